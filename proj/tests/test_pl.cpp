#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "stablerank/instances.hpp"
#include "stablerank/pl.hpp"
#include "support/oracles.hpp"

using namespace stablerank;

namespace {

// Vertex indices of a 1-d mesh ordered by their embedded coordinate.
std::vector<int> vertices_by_coordinate(const SimplicialMesh& m) {
  std::vector<int> order(m.vertex_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&m](int a, int b) { return m.vertex(a)[0] < m.vertex(b)[0]; });
  return order;
}

}  // namespace

TEST_SUITE("pl") {

TEST_CASE("sup norm is the vertex modulus maximum and bounds every sample") {
  MeshPtr m2 = build_mesh(ShapeTag::Interval, 2);
  PLFunction f(m2, Field::Complex,
               {Complex(0, 0), Complex(0, 1), Complex(-2, 0)});
  CHECK(sup_norm(f) == 2.0);
  CHECK(sup_norm(PLFunction::constant(m2, Field::Complex, 1.0)) == 1.0);

  MeshPtr m = build_mesh(ShapeTag::Torus, 4);
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    PLFunction g = random_pl_function(m, Field::Complex, rng);
    const double sup = sup_norm(g);
    CHECK(oracles::sampled_max_modulus(g, 1000, 100 + i) <= sup);
    bool attained = false;
    for (int v = 0; v < g.size(); ++v)
      if (modulus(g.value(v)) == sup) attained = true;
    CHECK(attained);
  }
}

TEST_CASE("normalize_to_unit lands on computed modulus exactly one") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double mag = std::pow(10.0, rng.uniform(-6.0, 6.0));
    const Complex z = rng.unit_circle() * mag;
    CHECK(modulus(normalize_to_unit(z)) == 1.0);
  }
  CHECK_THROWS_AS(normalize_to_unit(Complex(0.0, 0.0)), std::domain_error);
}

TEST_CASE("clip_modulus caps exactly and never touches interior values") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const Complex z = rng.unit_disk() * 3.0;
    const double cap = rng.uniform(0.1, 2.0);
    const Complex c = clip_modulus(z, cap);
    CHECK(modulus(c) <= cap);
    if (modulus(z) <= cap) {
      CHECK(c.real() == z.real());
      CHECK(c.imag() == z.imag());
    }
  }
}

TEST_CASE("pl_normalize is idempotent and unimodular at vertices") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 16);
  Rng rng(7);
  PLFunction f = random_pl_function(m, Field::Complex, rng);
  PLFunction n1 = pl_normalize(f);
  for (int v = 0; v < n1.size(); ++v) CHECK(modulus(n1.value(v)) == 1.0);
  PLFunction n2 = pl_normalize(n1);
  for (int v = 0; v < n1.size(); ++v) {
    CHECK(n2.value(v).real() == n1.value(v).real());
    CHECK(n2.value(v).imag() == n1.value(v).imag());
  }
}

TEST_CASE("affine recipes commute with interpolation") {
  MeshPtr m = build_mesh(ShapeTag::Rectangle, 3);
  Rng rng(9);
  PLFunction a = random_pl_function(m, Field::Complex, rng);
  PLFunction b = random_pl_function(m, Field::Complex, rng);
  const Complex s(2.0, 0.0), t(-3.0, 0.0), c(1.0, 2.0);
  std::vector<PLFunction> in = {a, b};
  PLFunction combo = pointwise_map(
      in, Field::Complex, [&](std::span<const Complex> v) {
        return s * v[0] + t * v[1] + c;
      });
  Rng sampler(10);
  for (int i = 0; i < 500; ++i) {
    MeshPoint p = sample_point(*m, sampler);
    const Complex lhs = combo.eval(p);
    const Complex rhs = s * a.eval(p) + t * b.eval(p) + c;
    CHECK(modulus(lhs - rhs) <= 1e-13 * (1.0 + modulus(rhs)));
  }
}

TEST_CASE("nonlinear recipe error shrinks under global refinement") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 8);
  Rng rng(11);
  PLFunction f = random_pl_function(m, Field::Complex, rng);

  std::vector<double> err;
  for (int round = 0; round < 4; ++round) {
    std::vector<PLFunction> in = {f};
    PLFunction mod = pointwise_map(in, Field::Real,
                                   [](std::span<const Complex> v) {
                                     return Complex(modulus(v[0]), 0.0);
                                   });
    double worst = 0.0;
    Rng sampler(12);
    for (int i = 0; i < 1000; ++i) {
      MeshPoint p = sample_point(*f.mesh(), sampler);
      worst = std::max(worst,
                       std::abs(mod.eval(p).real() - modulus(f.eval(p))));
    }
    err.push_back(worst);
    if (round < 3) {
      MeshRefinement ref = refine_mesh(f.mesh(), RefineStrategy::Global);
      f = transfer(ref, f);
    }
  }
  for (std::size_t r = 1; r < err.size(); ++r)
    CHECK(err[r] <= err[r - 1] + 1e-12);
  CHECK(err.back() < err.front());
}

TEST_CASE("pointwise_map rejects a real output field for complex values") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 2);
  PLFunction f = PLFunction::constant(m, Field::Complex, Complex(0.0, 1.0));
  std::vector<PLFunction> in = {f};
  CHECK_THROWS_AS(pointwise_map(in, Field::Real,
                                [](std::span<const Complex> v) {
                                  return v[0];
                                }),
                  std::invalid_argument);
}

TEST_CASE("canonical coefficient recipe sums to one at every vertex") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 16);
  Rng rng(13);
  PLTuple f({random_pl_function(m, Field::Complex, rng),
             random_pl_function(m, Field::Complex, rng)});
  PLFunction g = random_pl_function(m, Field::Complex, rng);

  for (int v = 0; v < g.size(); ++v) {
    double s = modulus(g.value(v)) * modulus(g.value(v));
    for (int j = 0; j < f.n(); ++j)
      s += modulus(f[j].value(v)) * modulus(f[j].value(v));
    Complex sum = std::conj(g.value(v)) / s * g.value(v);
    for (int j = 0; j < f.n(); ++j)
      sum += std::conj(f[j].value(v)) / s * f[j].value(v);
    CHECK(modulus(sum - Complex(1.0, 0.0)) <= 1e-12);
  }
}

TEST_CASE("cutoff blend never exceeds modulus one at a vertex") {
  MeshPtr m = build_mesh(ShapeTag::Rectangle, 4);
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    PLFunction g = random_pl_function(m, Field::Complex, rng);
    const double top = sup_norm(g);
    PLFunction psi = urysohn_from_levels(g, 0.3 * top, 0.6 * top);
    PLFunction y = random_pl_function(m, Field::Complex, rng, 0.0, 0.5);
    std::vector<PLFunction> in = {psi, y};
    PLFunction blend = pointwise_map(
        in, Field::Complex, [](std::span<const Complex> v) {
          return v[0] + v[1] * (Complex(1.0, 0.0) - v[0]);
        });
    for (int v = 0; v < blend.size(); ++v)
      CHECK(modulus(blend.value(v)) <= 1.0);
    CHECK(sup_norm(blend) <= 1.0);
  }
}

TEST_CASE("level-set cutoff: plateaus are bit-exact and the ramp is monotone") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 10);

  PLFunction zero = PLFunction::constant(m, Field::Complex, 0.0);
  PLFunction one = PLFunction::constant(m, Field::Complex, 1.0);
  PLFunction all_in = urysohn_from_levels(zero, 0.25, 0.5);
  PLFunction all_out = urysohn_from_levels(one, 0.25, 0.5);
  for (int v = 0; v < all_in.size(); ++v) {
    CHECK(all_in.value(v).real() == 1.0);
    CHECK(all_out.value(v).real() == 0.0);
  }

  PLFunction x = PLFunction::coordinate(m, Field::Complex, 0);
  PLFunction psi = urysohn_from_levels(x, 0.2, 0.4);
  const auto order = vertices_by_coordinate(*m);
  CHECK(psi.value(order.front()).real() == 1.0);
  CHECK(psi.value(order.back()).real() == 0.0);
  double prev = 1.0;
  for (int v : order) {
    const double val = psi.value(v).real();
    CHECK(val >= 0.0);
    CHECK(val <= 1.0);
    CHECK(val <= prev + 1e-15);
    prev = val;
  }
  CHECK(sup_norm(psi) <= 1.0);

  // the complementary ramp partitions unity against the inside-one ramp
  PLFunction phi = urysohn_from_levels(x, 0.2, 0.4, false);
  for (int v = 0; v < psi.size(); ++v) {
    CHECK(std::abs(psi.value(v).real() + phi.value(v).real() - 1.0) <= 1e-14);
    const double mx = modulus(x.value(v));
    if (mx <= 0.2) CHECK(phi.value(v).real() == 0.0);
    if (mx >= 0.4) CHECK(phi.value(v).real() == 1.0);
  }

  CHECK_THROWS_AS(urysohn_from_levels(x, 0.4, 0.2), std::invalid_argument);
}

TEST_CASE("pl_divide is vertex-wise exact and rejects vertex zeros") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 8);
  Rng rng(17);
  PLFunction a = random_pl_function(m, Field::Complex, rng);
  PLFunction b = random_pl_function(m, Field::Complex, rng, 0.5, 1.0);
  PLFunction q = pl_divide(a, b);
  for (int v = 0; v < q.size(); ++v) {
    const Complex expect = a.value(v) / b.value(v);
    CHECK(q.value(v).real() == expect.real());
    CHECK(q.value(v).imag() == expect.imag());
  }
  PLFunction zero = PLFunction::constant(m, Field::Complex, 0.0);
  CHECK_THROWS_AS(pl_divide(a, zero), std::domain_error);
}

TEST_CASE("join and subtuple index bookkeeping") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 4);
  Rng rng(19);
  PLTuple t({random_pl_function(m, Field::Complex, rng),
             random_pl_function(m, Field::Complex, rng)});
  PLFunction g = random_pl_function(m, Field::Complex, rng);
  PLTuple j = join(t, g);
  CHECK(j.n() == 3);
  for (int v = 0; v < g.size(); ++v) {
    CHECK(j[2].value(v).real() == g.value(v).real());
    CHECK(j[2].value(v).imag() == g.value(v).imag());
  }
  const std::vector<int> keep = {0, 2};
  PLTuple s = subtuple(j, keep);
  CHECK(s.n() == 2);
  CHECK(s[1].value(1).real() == g.value(1).real());
  const std::vector<int> bad = {3};
  CHECK_THROWS_AS(subtuple(j, bad), std::invalid_argument);
}

TEST_CASE("rescale_to_unit_sup hits sup norm exactly one") {
  MeshPtr m = build_mesh(ShapeTag::Circle, 12);
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    PLFunction f = random_pl_function(m, Field::Complex, rng, 0.2, 3.0);
    CHECK(sup_norm(rescale_to_unit_sup(f)) == 1.0);
  }
}

TEST_CASE("argmin vertex picks the lowest index among ties") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 4);
  PLFunction c = PLFunction::constant(m, Field::Complex, 2.0);
  CHECK(argmin_vertex_modulus(c) == 0);
  PLFunction f(m, Field::Complex,
               {Complex(1, 0), Complex(2, 0), Complex(0.25, 0), Complex(1, 1),
                Complex(0.25, 0)});
  CHECK(argmin_vertex_modulus(f) == 2);
}

}  // TEST_SUITE
