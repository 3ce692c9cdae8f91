#include <benchmark/benchmark.h>

#include "stablerank/certify.hpp"
#include "stablerank/disk.hpp"
#include "stablerank/instances.hpp"
#include "stablerank/reduce.hpp"

using namespace stablerank;
using namespace stablerank::disk;

static void BM_min_modulus_pl(benchmark::State& state) {
  MeshPtr mesh = build_mesh(ShapeTag::Torus, 8);
  CertifiedPair pair = random_certified_pair(mesh, Field::Complex, 2, 42);
  PLTuple joint = join(pair.f, pair.g);
  for (auto _ : state) {
    MinModulusResult r = min_modulus_pl(joint);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_min_modulus_pl);

static void BM_bernstein_certify(benchmark::State& state) {
  MeshPtr mesh = build_mesh(ShapeTag::Torus, 8);
  CertifiedPair pair = random_certified_pair(mesh, Field::Complex, 2, 43);
  QuadExpr expr = expr_from_tuple(join(pair.f, pair.g));
  const double floor = 0.5 * pair.joint_min;
  for (auto _ : state) {
    BernsteinOutcome out = certify_min_modulus_expr(expr, floor);
    benchmark::DoNotOptimize(out.ok);
  }
}
BENCHMARK(BM_bernstein_certify);

static void BM_norm_one_interval(benchmark::State& state) {
  MeshPtr mesh = build_mesh(ShapeTag::Interval, 32);
  CertifiedPair pair = random_vanishing_pair(mesh, Field::Complex, 2, 200);
  ReductionParams params;
  params.seed = 200;
  params.max_refinements = 8;
  for (auto _ : state) {
    ReductionOutcome out = norm_one_reduce(pair.f, pair.g, params);
    benchmark::DoNotOptimize(out.witness.case_label);
  }
}
BENCHMARK(BM_norm_one_interval);

static void BM_disk_winding(benchmark::State& state) {
  Poly p = Poly::one();
  const Complex roots[] = {{0.5, 0.0}, {-0.3, 0.4}, {1.5, -0.2}, {0.0, -0.8}};
  for (Complex r : roots) p = p_mul(p, Poly{{-r, Complex(1.0, 0.0)}});
  for (auto _ : state) {
    WindingResult w = disk_winding(p);
    benchmark::DoNotOptimize(w.winding);
  }
}
BENCHMARK(BM_disk_winding);

BENCHMARK_MAIN();
