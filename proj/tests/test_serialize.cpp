#include <string>

#include "doctest.h"
#include "stablerank/instances.hpp"
#include "stablerank/serialize.hpp"

using namespace stablerank;

namespace {

ProblemSpec ramp_problem(int resolution, std::uint64_t seed) {
  ProblemSpec p;
  p.operation = Operation::SmallNorm;
  p.algebra = "pl-mesh";
  p.field = Field::Complex;
  p.mesh = build_mesh(ShapeTag::Interval, resolution);
  PLFunction x = PLFunction::coordinate(p.mesh, Field::Complex, 0);
  p.f = PLTuple({x});
  p.g = pl_shift(pl_scale(x, Complex(-1.0, 0.0)), Complex(1.0, 0.0));
  p.params.epsilon = 0.1;
  p.params.seed = seed;
  return p;
}

ProblemSpec disk_problem() {
  ProblemSpec p;
  p.operation = Operation::DiskNormOne;
  p.algebra = "disk";
  p.field = Field::Complex;
  disk::Poly num1 = disk::Poly::z();
  disk::Poly num2;
  num2.coeff = {Complex(1, 0), Complex(-2, 0)};
  p.disk_f.comps = {disk::element(num1), disk::element(num2)};
  disk::Poly gnum;
  gnum.coeff = {Complex(-0.5, 0), Complex(0.5, 0)};
  disk::Poly gden;
  gden.coeff = {Complex(1, 0), Complex(0, 0.25)};
  p.disk_g = disk::element(gnum, gden);
  p.disk_y.comps = {disk::element(disk::Poly::zero()),
                    disk::element(disk::Poly::zero())};
  return p;
}

WitnessDocument run_ramp_document(std::uint64_t seed) {
  ProblemSpec p = ramp_problem(16, seed);
  ReductionOutcome out =
      small_norm_reduce(p.f, p.g, p.params.epsilon, p.params);
  REQUIRE(out.ok);
  WitnessDocument doc;
  doc.problem = p;
  doc.ok = true;
  doc.kind = "reduction";
  doc.reduction = out.witness;
  return doc;
}

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("problem documents round-trip byte for byte") {
  ProblemSpec p = ramp_problem(8, 3);
  const std::string once = problem_to_json(p);
  ProblemSpec q = problem_from_json(once);
  CHECK(problem_to_json(q) == once);
  CHECK(q.operation == p.operation);
  CHECK(q.mesh->vertex_count() == p.mesh->vertex_count());
  CHECK(q.f.n() == p.f.n());
  for (int v = 0; v < q.g.size(); ++v) {
    CHECK(q.g.value(v).real() == p.g.value(v).real());
    CHECK(q.g.value(v).imag() == p.g.value(v).imag());
  }

  ProblemSpec d = disk_problem();
  const std::string donce = problem_to_json(d);
  ProblemSpec d2 = problem_from_json(donce);
  CHECK(problem_to_json(d2) == donce);
  // the loaded quotient was re-certified, not copied
  CHECK(d2.disk_g.den_lower > 0.0);
}

TEST_CASE("witness documents round-trip, re-verify, and strip cleanly") {
  WitnessDocument doc = run_ramp_document(5);
  const std::string once = witness_to_json(doc);
  WitnessDocument back = witness_from_json(once);
  CHECK(witness_to_json(back) == once);
  CHECK(back.ok);
  CHECK(back.kind == "reduction");
  CHECK(verify_witness(back.problem.f, back.problem.g, back.reduction).ok);

  WitnessDocument stripped = doc;
  strip_traces(stripped);
  const std::string small = witness_to_json(stripped);
  CHECK(small.size() < once.size());
  WitnessDocument back2 = witness_from_json(small);
  CHECK(witness_to_json(back2) == small);
  // traces are rebuilt from scratch during verification, so stripping
  // cannot affect the verdict
  CHECK(verify_witness(back2.problem.f, back2.problem.g, back2.reduction).ok);
}

TEST_CASE("serialization is deterministic across identical runs") {
  WitnessDocument a = run_ramp_document(9);
  WitnessDocument b = run_ramp_document(9);
  CHECK(witness_to_json(a) == witness_to_json(b));

  WitnessDocument c = run_ramp_document(10);
  CHECK(witness_to_json(a) != witness_to_json(c));
}

TEST_CASE("timing data is opt-in so equal seeds give equal bytes") {
  WitnessDocument doc = run_ramp_document(11);
  doc.has_timing = false;
  doc.elapsed_seconds = 123.0;
  const std::string quiet = witness_to_json(doc);
  CHECK(quiet.find("elapsed") == std::string::npos);
  doc.has_timing = true;
  const std::string loud = witness_to_json(doc);
  CHECK(loud.find("elapsed") != std::string::npos);
}

TEST_CASE("malformed inputs are rejected with parse errors") {
  CHECK_THROWS_AS(problem_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(problem_from_json("[1, 2, 3]"), std::invalid_argument);
  CHECK_THROWS_AS(witness_from_json("not json at all"),
                  std::invalid_argument);
  CHECK_THROWS_AS(operation_from_name("frobnicate"), std::invalid_argument);
  CHECK_THROWS_AS(field_from_name("quaternion"), std::invalid_argument);

  ProblemSpec p = ramp_problem(4, 1);
  std::string text = problem_to_json(p);
  const std::string key = "\"schema\": 1";
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, key.size(), "\"schema\": 99");
  CHECK_THROWS_AS(problem_from_json(text), std::invalid_argument);
}

TEST_CASE("certification documents carry bare certificate payloads") {
  ProblemSpec p = ramp_problem(8, 2);
  p.operation = Operation::Certify;
  MinModulusResult mm = min_modulus_pl(join(p.f, p.g));
  WitnessDocument doc;
  doc.problem = p;
  doc.ok = mm.cert.value > 0.0;
  doc.kind = "certification";
  doc.certificates.push_back(mm.cert);
  const std::string once = witness_to_json(doc);
  WitnessDocument back = witness_from_json(once);
  CHECK(witness_to_json(back) == once);
  REQUIRE(back.certificates.size() == 1);
  CHECK(back.certificates[0].value == mm.cert.value);
  CHECK(back.certificates[0].kind == mm.cert.kind);
}

TEST_CASE("operation names round-trip through their parser") {
  for (Operation op :
       {Operation::SmallNorm, Operation::NormOne, Operation::AllUnits,
        Operation::Unitary, Operation::Stabilize, Operation::Certify,
        Operation::DiskNormOne, Operation::DiskWitnessSearch}) {
    CHECK(operation_from_name(operation_name(op)) == op);
  }
}

}  // TEST_SUITE
