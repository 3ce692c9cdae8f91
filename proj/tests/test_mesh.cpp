#include <array>
#include <cmath>
#include <set>
#include <utility>

#include "doctest.h"
#include "stablerank/instances.hpp"
#include "stablerank/mesh.hpp"
#include "stablerank/pl.hpp"
#include "support/oracles.hpp"

using namespace stablerank;

namespace {

// Undirected edge count of a complex, by brute enumeration of simplex faces.
int count_edges(const SimplicialMesh& m) {
  std::set<std::pair<int, int>> edges;
  for (int s = 0; s < m.simplex_count(); ++s) {
    const auto sx = m.simplex(s);
    for (int i = 0; i < m.dimension + 1; ++i)
      for (int j = i + 1; j < m.dimension + 1; ++j)
        edges.insert({std::min(sx[i], sx[j]), std::max(sx[i], sx[j])});
  }
  return static_cast<int>(edges.size());
}

double triangle_area(const SimplicialMesh& m, int s) {
  const auto sx = m.simplex(s);
  const auto a = m.vertex(sx[0]);
  const auto b = m.vertex(sx[1]);
  const auto c = m.vertex(sx[2]);
  const double ux = b[0] - a[0], uy = b[1] - a[1];
  const double vx = c[0] - a[0], vy = c[1] - a[1];
  return 0.5 * std::abs(ux * vy - uy * vx);
}

double total_area(const SimplicialMesh& m) {
  double sum = 0.0;
  for (int s = 0; s < m.simplex_count(); ++s) sum += triangle_area(m, s);
  return sum;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("interval builder counts and validity") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 4);
  CHECK(m->dimension == 1);
  CHECK(m->vertex_count() == 5);
  CHECK(m->simplex_count() == 4);
  CHECK_NOTHROW(validate_mesh(*m));
}

TEST_CASE("circle builder: every vertex lies in exactly two edges") {
  MeshPtr m = build_mesh(ShapeTag::Circle, 3);
  CHECK(m->vertex_count() == 3);
  CHECK(m->simplex_count() == 3);
  std::vector<int> degree(3, 0);
  for (int s = 0; s < m->simplex_count(); ++s)
    for (int v : m->simplex(s)) ++degree[v];
  for (int d : degree) CHECK(d == 2);
  CHECK_NOTHROW(validate_mesh(*m));
}

TEST_CASE("sphere builder: icosahedral subdivision counts and Euler number") {
  MeshPtr m = build_mesh(ShapeTag::Sphere, 1);
  CHECK(m->vertex_count() == 42);
  CHECK(m->simplex_count() == 80);
  const int euler = m->vertex_count() - count_edges(*m) + m->simplex_count();
  CHECK(euler == 2);
  CHECK_NOTHROW(validate_mesh(*m));
  // every vertex of the embedded sphere sits on the unit sphere
  for (int v = 0; v < m->vertex_count(); ++v) {
    const auto p = m->vertex(v);
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("torus builder: closed surface with Euler number zero") {
  MeshPtr m = build_mesh(ShapeTag::Torus, 4);
  CHECK_NOTHROW(validate_mesh(*m));
  const int euler = m->vertex_count() - count_edges(*m) + m->simplex_count();
  CHECK(euler == 0);
}

TEST_CASE("builder rejects unusable resolutions and unknown shapes") {
  CHECK_THROWS_AS(build_mesh(ShapeTag::Interval, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(ShapeTag::Circle, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(ShapeTag::Torus, 2), std::invalid_argument);
  CHECK_THROWS_AS(shape_from_name("klein-bottle"), std::invalid_argument);
}

TEST_CASE("global refinement partitions parents and preserves semantics") {
  for (ShapeTag tag : {ShapeTag::Interval, ShapeTag::Rectangle}) {
    MeshPtr m = build_mesh(tag, 4);
    MeshRefinement ref = refine_mesh(m, RefineStrategy::Global);
    CHECK_NOTHROW(validate_mesh(*ref.mesh));
    const int children_per_parent = (m->dimension == 1) ? 2 : 4;
    CHECK(ref.mesh->simplex_count() ==
          m->simplex_count() * children_per_parent);

    // the parent map covers every parent simplex
    std::vector<int> hits(m->simplex_count(), 0);
    for (int p : ref.parent_simplex) ++hits[p];
    for (int h : hits) CHECK(h == children_per_parent);

    // a refined point and its parent image embed to the same location
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
      MeshPoint q = sample_point(*ref.mesh, rng);
      MeshPoint parent = to_parent_point(ref, q);
      const auto xq = embed_point(*ref.mesh, q);
      const auto xp = embed_point(*m, parent);
      REQUIRE(xq.size() == xp.size());
      for (std::size_t k = 0; k < xq.size(); ++k)
        CHECK(xq[k] == doctest::Approx(xp[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("subset refinement stays conforming and preserves total area") {
  MeshPtr m = build_mesh(ShapeTag::Rectangle, 2);
  const double before = total_area(*m);
  const std::vector<int> marked = {0};
  MeshRefinement ref = refine_mesh(m, RefineStrategy::Subset, marked);
  CHECK_NOTHROW(validate_mesh(*ref.mesh));
  CHECK(ref.mesh->simplex_count() > m->simplex_count());
  CHECK(total_area(*ref.mesh) == doctest::Approx(before).epsilon(1e-12));
  // the marked triangle is split into its four midpoint children
  int children_of_marked = 0;
  for (int p : ref.parent_simplex)
    if (p == 0) ++children_of_marked;
  CHECK(children_of_marked == 4);
}

TEST_CASE("transfer is exact for PL functions") {
  MeshPtr m = build_mesh(ShapeTag::Rectangle, 3);
  Rng rng(7);
  PLFunction f = random_pl_function(m, Field::Complex, rng);
  MeshRefinement ref = refine_mesh(m, RefineStrategy::Global);
  PLFunction tf = transfer(ref, f);

  Rng sampler(8);
  for (int i = 0; i < 1000; ++i) {
    MeshPoint q = sample_point(*ref.mesh, sampler);
    const Complex a = tf.eval(q);
    const Complex b = f.eval(to_parent_point(ref, q));
    CHECK(modulus(a - b) <= 4e-15 * (1.0 + modulus(b)));
  }
}

TEST_CASE("transfer preserves the exact sup norm") {
  MeshPtr m = build_mesh(ShapeTag::Interval, 16);
  MeshRefinement ref = refine_mesh(m, RefineStrategy::Global);
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    PLFunction f = random_pl_function(m, Field::Complex, rng);
    CHECK(sup_norm(transfer(ref, f)) == sup_norm(f));
  }
}

TEST_CASE("sample_point is deterministic in the seed") {
  MeshPtr m = build_mesh(ShapeTag::Torus, 4);
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    MeshPoint p = sample_point(*m, a);
    MeshPoint q = sample_point(*m, b);
    CHECK(p.simplex == q.simplex);
    REQUIRE(p.bary.size() == q.bary.size());
    for (std::size_t k = 0; k < p.bary.size(); ++k)
      CHECK(p.bary[k] == q.bary[k]);
  }
}

}  // TEST_SUITE
