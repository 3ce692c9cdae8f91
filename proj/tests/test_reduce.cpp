#include <cmath>
#include <vector>

#include "doctest.h"
#include "stablerank/instances.hpp"
#include "stablerank/reduce.hpp"
#include "support/oracles.hpp"

using namespace stablerank;

namespace {

PLFunction ramp_down(const MeshPtr& m) {  // 1 - x
  PLFunction x = PLFunction::coordinate(m, Field::Complex, 0);
  return pl_shift(pl_scale(x, Complex(-1.0, 0.0)), Complex(1.0, 0.0));
}

PLFunction replace_value(const PLFunction& f, int vertex, Complex value) {
  std::vector<Complex> vals = f.values();
  vals[static_cast<std::size_t>(vertex)] = value;
  return PLFunction(f.mesh(), f.field(), std::move(vals));
}

}  // namespace

TEST_SUITE("reduce") {

TEST_CASE("approx_invertible accepts an already invertible tuple verbatim") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 16);
  PLTuple h({PLFunction::constant(m, Field::Complex, Complex(2.0, 0.0)),
             PLFunction::constant(m, Field::Complex, Complex(0.0, 0.5))});
  Rng rng(1);
  ApproxResult r = approx_invertible(h, 0.1, rng, 24);
  REQUIRE(r.ok);
  CHECK(r.attempts == 0);  // no perturbation spent: h itself was accepted
  CHECK(r.cert.value > 0.0);
  for (int j = 0; j < h.n(); ++j)
    for (int v = 0; v < h[j].size(); ++v) {
      CHECK(r.u[j].value(v).real() == h[j].value(v).real());
      CHECK(r.u[j].value(v).imag() == h[j].value(v).imag());
    }
}

TEST_CASE("approx_invertible perturbs a complex zero-crossing within budget") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 16);
  PLFunction x = PLFunction::coordinate(m, Field::Complex, 0);
  PLTuple h({pl_shift(x, Complex(-0.5, 0.0))});
  Rng rng(2);
  ApproxResult r = approx_invertible(h, 0.1, rng, 24);
  REQUIRE(r.ok);
  CHECK(r.cert.value > 0.0);
  CHECK(sup_norm(pl_sub(r.u, h)[0]) < 0.1);
  CHECK(min_modulus_pl(r.u).cert.value > 0.0);
}

TEST_CASE("approx_invertible reports the real sign-change obstruction") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 16);
  PLFunction x = PLFunction::coordinate(m, Field::Real, 0);
  PLTuple h({pl_shift(x, Complex(-0.5, 0.0))});
  Rng rng(3);
  ApproxResult r = approx_invertible(h, 0.01, rng, 24);
  CHECK_FALSE(r.ok);
}

TEST_CASE("small-norm reduction on the ramp pair holds the budget exactly") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 32);
  PLTuple f({PLFunction::coordinate(m, Field::Complex, 0)});
  PLFunction g = ramp_down(m);
  ReductionParams params;
  params.seed = 5;
  ReductionOutcome out = small_norm_reduce(f, g, 0.1, params);
  REQUIRE(out.ok);
  const ReductionWitness& w = out.witness;
  CHECK(w.kind == WitnessKind::SmallNorm);
  for (int j = 0; j < w.multiplier.n(); ++j)
    CHECK(sup_norm(w.multiplier[j]) <= 0.1);
  VerifyReport rep = verify_witness(f, g, w);
  CHECK(rep.ok);
}

TEST_CASE("small-norm reduction succeeds at a punishing budget") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 32);
  PLTuple f({PLFunction::coordinate(m, Field::Complex, 0)});
  PLFunction g = ramp_down(m);
  ReductionParams params;
  params.seed = 6;
  params.max_refinements = 8;
  ReductionOutcome out = small_norm_reduce(f, g, 1e-6, params);
  REQUIRE(out.ok);
  for (int j = 0; j < out.witness.multiplier.n(); ++j)
    CHECK(sup_norm(out.witness.multiplier[j]) <= 1e-6);
  CHECK(verify_witness(f, g, out.witness).ok);
}

TEST_CASE("small-norm reduction with a unit g leaves f untouched") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 8);
  PLTuple f({PLFunction::constant(m, Field::Complex, Complex(2.0, 0.0)),
             PLFunction::constant(m, Field::Complex, Complex(0.0, 0.5))});
  PLFunction g = PLFunction::constant(m, Field::Complex, 1.0);
  ReductionParams params;
  params.seed = 7;
  ReductionOutcome out = small_norm_reduce(f, g, 0.25, params);
  REQUIRE(out.ok);
  for (int j = 0; j < out.witness.multiplier.n(); ++j)
    for (int v = 0; v < out.witness.multiplier[j].size(); ++v)
      CHECK(modulus(out.witness.multiplier[j].value(v)) == 0.0);
}

TEST_CASE("norm-one reduction, invertible-g scalar branch") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 8);
  PLTuple f({PLFunction::constant(m, Field::Complex, 0.0)});
  PLFunction g = PLFunction::constant(m, Field::Complex, 1.0);
  ReductionParams params;
  params.seed = 8;
  ReductionOutcome out = norm_one_reduce(f, g, params);
  REQUIRE(out.ok);
  const ReductionWitness& w = out.witness;
  CHECK(w.case_label == 1);
  REQUIRE(w.multiplier.n() == 1);
  CHECK(sup_norm(w.multiplier[0]) == 1.0);
  for (int v = 0; v < w.multiplier[0].size(); ++v)
    CHECK(modulus(w.multiplier[0].value(v)) == 1.0);
  CHECK(verify_witness(f, g, w).ok);
}

TEST_CASE("norm-one reduction, blended-cutoff branch on the ramp pair") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 32);
  PLTuple f({PLFunction::coordinate(m, Field::Complex, 0)});
  PLFunction g = ramp_down(m);
  ReductionParams params;
  params.seed = 9;
  params.max_refinements = 8;
  ReductionOutcome out = norm_one_reduce(f, g, params);
  REQUIRE(out.ok);
  const ReductionWitness& w = out.witness;
  CHECK(w.case_label == 2);
  CHECK(sup_norm(w.multiplier[0]) == 1.0);
  REQUIRE(w.designated_vertex >= 0);
  CHECK(modulus(w.multiplier[0].value(w.designated_vertex)) == 1.0);
  CHECK(w.thresholds.floor > 0.0);
  CHECK(w.thresholds.floor >=
        w.thresholds.c * std::sqrt(3.0) / 4.0 * (1.0 - 1e-6) * (1.0 - 1e-12));
  CHECK(verify_witness(f, g, w).ok);

  SUBCASE("tampering with any recorded array breaks verification") {
    ReductionWitness bad = w;
    bad.multiplier.comps[0] = replace_value(bad.multiplier[0], 0,
                                            bad.multiplier[0].value(0) +
                                                Complex(0.5, 0.0));
    CHECK_FALSE(verify_witness(f, g, bad).ok);

    ReductionWitness bad2 = w;
    bad2.reduced.comps[0] = replace_value(bad2.reduced[0], 0,
                                          bad2.reduced[0].value(0) +
                                              Complex(0.5, 0.0));
    CHECK_FALSE(verify_witness(f, g, bad2).ok);

    ReductionWitness bad3 = w;
    bad3.thresholds.floor *= 10.0;
    CHECK_FALSE(verify_witness(f, g, bad3).ok);
  }
}

TEST_CASE("norm-one reduction handles a vertex zero of g") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 32);
  CertifiedPair pair = random_vanishing_pair(m, Field::Complex, 1, 200);
  ReductionParams params;
  params.seed = 200;
  params.max_refinements = 8;
  ReductionOutcome out = norm_one_reduce(pair.f, pair.g, params);
  REQUIRE(out.ok);
  CHECK(out.witness.case_label == 2);
  REQUIRE(out.witness.designated_vertex >= 0);
  CHECK(modulus(out.witness.multiplier[0].value(out.witness.designated_vertex)) ==
        1.0);
  CHECK(verify_witness(pair.f, pair.g, out.witness).ok);
}

TEST_CASE("norm-one reduction, subtuple branch on the torus") {
  MeshPtr m = build_mesh(ShapeTag::Torus, 8);
  CertifiedPair pair = random_positive_g_pair(m, Field::Complex, 2, 300);
  ReductionParams params;
  params.seed = 300;
  ReductionOutcome out = norm_one_reduce(pair.f, pair.g, params);
  REQUIRE(out.ok);
  const ReductionWitness& w = out.witness;
  CHECK(w.case_label == 3);
  for (int j = 0; j < w.multiplier.n(); ++j)
    CHECK(sup_norm(w.multiplier[j]) == 1.0);
  REQUIRE(!w.subtuple.empty());
  for (std::size_t k = 1; k < w.subtuple.size(); ++k)
    CHECK(w.subtuple[k - 1] < w.subtuple[k]);
  CHECK(verify_witness(pair.f, pair.g, w).ok);
}

TEST_CASE("norm-one reduction is deterministic in the seed") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 32);
  PLTuple f({PLFunction::coordinate(m, Field::Complex, 0)});
  PLFunction g = ramp_down(m);
  ReductionParams params;
  params.seed = 77;
  params.max_refinements = 8;
  ReductionOutcome a = norm_one_reduce(f, g, params);
  ReductionOutcome b = norm_one_reduce(f, g, params);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  REQUIRE(a.witness.multiplier.n() == b.witness.multiplier.n());
  for (int j = 0; j < a.witness.multiplier.n(); ++j)
    for (int v = 0; v < a.witness.multiplier[j].size(); ++v) {
      CHECK(a.witness.multiplier[j].value(v).real() ==
            b.witness.multiplier[j].value(v).real());
      CHECK(a.witness.multiplier[j].value(v).imag() ==
            b.witness.multiplier[j].value(v).imag());
    }
  CHECK(a.witness.thresholds.floor == b.witness.thresholds.floor);
  CHECK(a.witness.refinements_used == b.witness.refinements_used);
}

TEST_CASE("minimal invertible subtuples match exhaustive enumeration") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 8);
  PLFunction x = PLFunction::coordinate(m, Field::Complex, 0);

  PLTuple with_unit({PLFunction::constant(m, Field::Complex, 1.0), x});
  SubtupleResult a = minimal_invertible_subtuple(with_unit);
  CHECK(a.indices == std::vector<int>{0});

  PLTuple crossing({x, ramp_down(m)});
  SubtupleResult b = minimal_invertible_subtuple(crossing);
  CHECK(b.indices == std::vector<int>{0, 1});
  CHECK(oracles::is_inclusion_minimal(crossing, b.indices));

  MeshPtr rect = build_mesh(ShapeTag::Rectangle, 4);
  for (int i = 0; i < 5; ++i) {
    Rng rng(800 + i);
    PLTuple u({random_pl_function(rect, Field::Complex, rng),
               random_pl_function(rect, Field::Complex, rng),
               random_pl_function(rect, Field::Complex, rng)});
    if (!(min_modulus_pl(u).cert.value > 0.0)) continue;
    SubtupleResult s = minimal_invertible_subtuple(u);
    CHECK(oracles::is_inclusion_minimal(u, s.indices));
  }

  PLTuple dead({pl_shift(x, Complex(-0.5, 0.0))});
  CHECK_THROWS_AS(minimal_invertible_subtuple(dead), std::domain_error);
}

TEST_CASE("all-units reduction: unit components with a certified margin") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 32);
  PLTuple f({PLFunction::coordinate(m, Field::Complex, 0)});
  PLFunction g = ramp_down(m);
  ReductionParams params;
  params.seed = 10;
  ReductionOutcome out = all_units_reduce(f, g, params);
  REQUIRE(out.ok);
  const ReductionWitness& w = out.witness;
  CHECK(w.kind == WitnessKind::AllUnits);
  for (int j = 0; j < w.multiplier.n(); ++j) {
    MinModulusResult mm = min_modulus_pl(PLTuple({w.multiplier[j]}));
    CHECK(mm.cert.value >= 0.5 - 1e-8);
  }
  CHECK(verify_witness(f, g, w).ok);

  ReductionParams wild = params;
  wild.epsilon = 1.0;
  CHECK_THROWS_AS(all_units_reduce(f, g, wild), std::invalid_argument);
}

TEST_CASE("unitary reduction: trivial and ramp instances") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 8);
  PLTuple a({PLFunction::constant(m, Field::Complex, Complex(1.0, 0.0)),
             PLFunction::constant(m, Field::Complex, Complex(0.0, 1.0))});
  PLFunction zero = PLFunction::constant(m, Field::Complex, 0.0);
  ReductionParams params;
  params.seed = 11;
  ReductionOutcome out = unitary_reduce(a, zero, params);
  REQUIRE(out.ok);
  for (int j = 0; j < out.witness.multiplier.n(); ++j)
    for (int v = 0; v < out.witness.multiplier[j].size(); ++v) {
      CHECK(out.witness.multiplier[j].value(v).real() == 1.0);
      CHECK(out.witness.multiplier[j].value(v).imag() == 0.0);
    }
  CHECK(verify_witness(a, zero, out.witness).ok);

  MeshPtr m32 = build_mesh(ShapeTag::Interval, 32);
  PLTuple fx({PLFunction::coordinate(m32, Field::Complex, 0)});
  PLFunction g = ramp_down(m32);
  ReductionOutcome out2 = unitary_reduce(fx, g, params);
  REQUIRE(out2.ok);
  CHECK(out2.witness.kind == WitnessKind::Unitary);
  CHECK(min_modulus_pl(out2.witness.multiplier).cert.value > 0.0);
  CHECK(verify_witness(fx, g, out2.witness).ok);
}

TEST_CASE("stabilization keeps trailing components at one") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 32);
  Rng rng(12);
  PLTuple f({PLFunction::constant(m, Field::Complex, 1.0),
             random_pl_function(m, Field::Complex, rng)});
  PLFunction g = random_pl_function(m, Field::Complex, rng);
  ReductionParams params;
  params.seed = 12;
  ReductionOutcome out = stabilize_reduce(f, g, 1, params);
  REQUIRE(out.ok);
  const ReductionWitness& w = out.witness;
  CHECK(w.kind == WitnessKind::Stabilize);
  CHECK(w.stabilize_n == 1);
  REQUIRE(w.multiplier.n() == 2);
  for (int v = 0; v < w.multiplier[1].size(); ++v) {
    CHECK(w.multiplier[1].value(v).real() == 1.0);
    CHECK(w.multiplier[1].value(v).imag() == 0.0);
  }
  CHECK(min_modulus_pl(w.multiplier).cert.value > 0.0);
  CHECK(verify_witness(f, g, w).ok);
}

TEST_CASE("stabilization at full length degenerates to the small-norm rules") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 16);
  PLTuple f({PLFunction::constant(m, Field::Complex, Complex(2.0, 0.0)),
             PLFunction::constant(m, Field::Complex, Complex(0.0, 0.5))});
  PLFunction g = ramp_down(m);
  ReductionParams params;
  params.seed = 13;
  ReductionOutcome out = stabilize_reduce(f, g, 2, params);
  REQUIRE(out.ok);
  CHECK(out.witness.stabilize_n == 2);
  for (int j = 0; j < out.witness.multiplier.n(); ++j)
    CHECK(sup_norm(out.witness.multiplier[j]) <= params.epsilon);
  CHECK(verify_witness(f, g, out.witness).ok);

  CHECK_THROWS_AS(stabilize_reduce(f, g, 3, params), std::invalid_argument);
  CHECK_THROWS_AS(stabilize_reduce(f, g, 0, params), std::invalid_argument);
}

TEST_CASE("reductions refuse inputs that are not jointly invertible") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 8);
  PLFunction x = PLFunction::coordinate(m, Field::Complex, 0);
  PLTuple f({pl_shift(x, Complex(-0.5, 0.0))});
  PLFunction g = pl_shift(x, Complex(-0.5, 0.0));  // same zero at x = 1/2
  ReductionParams params;
  CHECK_THROWS_AS(small_norm_reduce(f, g, 0.1, params), std::domain_error);
  CHECK_THROWS_AS(norm_one_reduce(f, g, params), std::domain_error);
  CHECK_THROWS_AS(all_units_reduce(f, g, params), std::domain_error);
  CHECK_THROWS_AS(unitary_reduce(f, g, params), std::domain_error);
}

}  // TEST_SUITE
