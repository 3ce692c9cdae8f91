#include "stablerank/instances.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <utility>

namespace stablerank {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

/// Check counter for one corpus entry.  Hot loops call ok_one()/fail_one so
/// that messages are only built on failure.
struct Tally {
  long long total = 0;
  long long failed = 0;
  std::string first_failure;

  void ok_one() { ++total; }
  void fail_one(std::string what) {
    ++total;
    ++failed;
    if (first_failure.empty()) first_failure = std::move(what);
  }
  void check(bool ok, const std::string& what) {
    if (ok)
      ok_one();
    else
      fail_one(what);
  }
  bool pass() const { return failed == 0; }
};

std::string count_detail(const Tally& t, const std::string& extra = {}) {
  std::string s = std::to_string(t.total - t.failed) + "/" +
                  std::to_string(t.total) + " checks";
  if (!extra.empty()) s += "; " + extra;
  if (!t.pass()) s += "; first failure: " + t.first_failure;
  return s;
}

/// Serialize one PL reduction run as a witness document (traces stripped so
/// the corpus documents stay small and byte-reproducible).
std::string pl_document(Operation op, const PLTuple& f, const PLFunction& g,
                        const ReductionParams& params,
                        const ReductionOutcome& out, int stabilize_n = 1) {
  WitnessDocument doc;
  doc.problem.operation = op;
  doc.problem.algebra = "pl-mesh";
  doc.problem.field = f.field();
  doc.problem.mesh = f.mesh();
  doc.problem.f = f;
  doc.problem.g = g;
  doc.problem.stabilize_n = stabilize_n;
  doc.problem.params = params;
  doc.ok = out.ok;
  doc.kind = "reduction";
  if (out.ok)
    doc.reduction = out.witness;
  else
    doc.failure = out.failure;
  strip_traces(doc);
  return witness_to_json(doc);
}

// -------------------------------------------------------------------------
// criterion 1: norm-one reduction over the interval, scalar complex pairs
// -------------------------------------------------------------------------

CorpusResult run_c1(bool quick) {
  CorpusResult r;
  r.name = "norm-one-interval";
  r.criterion = 1;
  Tally t;
  const int count = quick ? 20 : 100;
  MeshPtr mesh = build_mesh(ShapeTag::Interval, 32);
  std::vector<double> times;
  times.reserve(count);
  for (int s = 0; s < count; ++s) {
    const std::string tag = "seed " + std::to_string(s);
    CertifiedPair pair = random_certified_pair(mesh, Field::Complex, 1, s);
    ReductionParams params;
    params.seed = static_cast<std::uint64_t>(s);
    params.max_refinements = 8;  // the cutoff needs resolution near dips
    const auto t0 = Clock::now();
    ReductionOutcome out = norm_one_reduce(pair.f, pair.g, params);
    times.push_back(seconds_since(t0));
    t.check(out.ok, tag + ": reduction failed");
    if (!out.ok) continue;
    const ReductionWitness& w = out.witness;
    for (int j = 0; j < w.multiplier.n(); ++j)
      t.check(sup_norm(w.multiplier[j]) == 1.0,
              tag + ": multiplier sup-norm is not exactly 1");
    t.check(w.thresholds.floor > 0.0 || w.thresholds.delta_prime > 0.0,
            tag + ": no positive certified reduced minimum");
    t.check(verify_witness(pair.f, pair.g, w).ok,
            tag + ": witness did not re-verify");
    r.documents.push_back(
        pl_document(Operation::NormOne, pair.f, pair.g, params, out));
  }
  t.check(median(times) < 0.5, "median reduction time exceeded 0.5 s");
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(count) + " instances");
  return r;
}

// -------------------------------------------------------------------------
// criterion 2: norm-one reduction with a vertex zero of g (blended cutoff)
// -------------------------------------------------------------------------

CorpusResult run_c2(bool quick) {
  CorpusResult r;
  r.name = "norm-one-vanishing";
  r.criterion = 2;
  Tally t;
  MeshPtr mesh = build_mesh(ShapeTag::Interval, 32);
  const double margin = std::sqrt(3.0) / 4.0 * (1.0 - 1e-6);

  auto run_one = [&](const PLTuple& f, const PLFunction& g,
                     std::uint64_t seed, const std::string& tag) {
    ReductionParams params;
    params.seed = seed;
    params.max_refinements = 8;  // the cutoff needs resolution near the zero
    ReductionOutcome out = norm_one_reduce(f, g, params);
    t.check(out.ok, tag + ": reduction failed");
    if (!out.ok) return;
    const ReductionWitness& w = out.witness;
    t.check(w.case_label == 2, tag + ": expected the blended-cutoff branch");
    t.check(w.designated_vertex >= 0, tag + ": designated vertex missing");
    if (w.designated_vertex >= 0)
      for (int j = 0; j < w.multiplier.n(); ++j)
        t.check(modulus(w.multiplier[j].value(w.designated_vertex)) == 1.0,
                tag + ": designated vertex modulus is not exactly 1");
    t.check(w.thresholds.floor >= w.thresholds.c * margin * (1.0 - 1e-12),
            tag + ": certified floor fell below the margin");
    t.check(verify_witness(f, g, w).ok, tag + ": witness did not re-verify");
    r.documents.push_back(
        pl_document(Operation::NormOne, f, g, params, out));
  };

  {
    PLFunction x = PLFunction::coordinate(mesh, Field::Complex, 0);
    PLFunction g =
        pl_shift(pl_scale(x, Complex(-1.0, 0.0)), Complex(1.0, 0.0));
    run_one(PLTuple({x}), g, 1000, "ramp pair");
  }
  const int count = quick ? 10 : 50;
  for (int s = 0; s < count; ++s) {
    const std::uint64_t seed = 200 + s;
    CertifiedPair pair = random_vanishing_pair(mesh, Field::Complex, 1, seed);
    run_one(pair.f, pair.g, seed, "seed " + std::to_string(seed));
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(count + 1) + " instances");
  return r;
}

// -------------------------------------------------------------------------
// criterion 3: norm-one reduction on the torus, n = 2 (subtuple branch)
// -------------------------------------------------------------------------

CorpusResult run_c3(bool quick) {
  CorpusResult r;
  r.name = "norm-one-torus-subtuple";
  r.criterion = 3;
  Tally t;
  MeshPtr mesh = build_mesh(ShapeTag::Torus, 8);
  const int count = quick ? 10 : 50;
  for (int s = 0; s < count; ++s) {
    const std::uint64_t seed = 300 + s;
    const std::string tag = "seed " + std::to_string(seed);
    CertifiedPair pair = random_positive_g_pair(mesh, Field::Complex, 2, seed);
    ReductionParams params;
    params.seed = seed;
    ReductionOutcome out = norm_one_reduce(pair.f, pair.g, params);
    t.check(out.ok, tag + ": reduction failed");
    if (!out.ok) continue;
    const ReductionWitness& w = out.witness;
    t.check(w.case_label == 3, tag + ": expected the subtuple branch");
    for (int j = 0; j < w.multiplier.n(); ++j)
      t.check(sup_norm(w.multiplier[j]) == 1.0,
              tag + ": multiplier sup-norm is not exactly 1");
    t.check(!w.subtuple.empty(), tag + ": kept index set is empty");
    std::vector<char> kept(static_cast<std::size_t>(w.multiplier.n()), 0);
    for (int j : w.subtuple)
      if (j >= 0 && j < w.multiplier.n()) kept[j] = 1;
    for (int j = 0; j < w.multiplier.n(); ++j) {
      if (kept[j]) continue;
      bool ones = true;
      for (int v = 0; v < mesh->vertex_count() && ones; ++v) {
        const Complex z = w.multiplier[j].value(v);
        ones = z.real() == 1.0 && z.imag() == 0.0;
      }
      t.check(ones, tag + ": padding component is not identically 1");
    }
    t.check(w.thresholds.delta_prime > 0.0,
            tag + ": reduced tuple not certified");
    t.check(verify_witness(pair.f, pair.g, w).ok,
            tag + ": witness did not re-verify");

    // Exhaustive minimality oracle, run on this instance's certified joint
    // tuple: the greedy subtuple must be invertible while every proper
    // nonempty subset of it is not (exact minima, no tolerance).
    PLTuple joint = join(pair.f, pair.g);
    SubtupleResult st = minimal_invertible_subtuple(joint);
    const int full = 1 << joint.n();
    std::vector<char> inv(static_cast<std::size_t>(full), 0);
    for (int mask = 1; mask < full; ++mask) {
      std::vector<int> idx;
      for (int j = 0; j < joint.n(); ++j)
        if (mask & (1 << j)) idx.push_back(j);
      inv[mask] =
          min_modulus_pl(subtuple(joint, idx)).cert.value > 0.0 ? 1 : 0;
    }
    int kept_mask = 0;
    for (int j : st.indices) kept_mask |= 1 << j;
    t.check(kept_mask != 0 && inv[kept_mask] == 1,
            tag + ": greedy subtuple is not invertible");
    bool minimal = true;
    for (int sub = (kept_mask - 1) & kept_mask; sub != 0;
         sub = (sub - 1) & kept_mask)
      if (inv[sub]) {
        minimal = false;
        break;
      }
    t.check(minimal, tag + ": greedy subtuple is not inclusion-minimal");
    r.documents.push_back(
        pl_document(Operation::NormOne, pair.f, pair.g, params, out));
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(count) + " instances");
  return r;
}

// -------------------------------------------------------------------------
// criterion 4: small-norm reduction across three norm budgets
// -------------------------------------------------------------------------

CorpusResult run_c4(bool quick) {
  CorpusResult r;
  r.name = "small-norm-interval";
  r.criterion = 4;
  Tally t;
  MeshPtr mesh = build_mesh(ShapeTag::Interval, 32);
  const int count = quick ? 10 : 50;
  const double epsilons[] = {0.1, 0.01, 1e-4};
  for (int s = 0; s < count; ++s) {
    const std::uint64_t seed = 400 + s;
    CertifiedPair pair = random_certified_pair(mesh, Field::Complex, 1, seed);
    for (double eps : epsilons) {
      const std::string tag =
          "seed " + std::to_string(seed) + " eps " + std::to_string(eps);
      ReductionParams params;
      params.epsilon = eps;
      params.seed = seed;
      ReductionOutcome out = small_norm_reduce(pair.f, pair.g, eps, params);
      t.check(out.ok, tag + ": reduction failed");
      if (!out.ok) continue;
      const ReductionWitness& w = out.witness;
      for (int j = 0; j < w.multiplier.n(); ++j)
        t.check(sup_norm(w.multiplier[j]) <= eps,
                tag + ": multiplier exceeds the norm budget");
      t.check(w.thresholds.floor > 0.0 || w.thresholds.delta_prime > 0.0,
              tag + ": no positive certified reduced minimum");
      t.check(verify_witness(pair.f, pair.g, w).ok,
              tag + ": witness did not re-verify");
      r.documents.push_back(
          pl_document(Operation::SmallNorm, pair.f, pair.g, params, out));
    }
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(count) + " instances x 3 budgets");
  return r;
}

// -------------------------------------------------------------------------
// criterion 5: all-units reduction
// -------------------------------------------------------------------------

CorpusResult run_c5(bool quick) {
  CorpusResult r;
  r.name = "all-units-interval";
  r.criterion = 5;
  Tally t;
  MeshPtr mesh = build_mesh(ShapeTag::Interval, 32);
  const int count = quick ? 10 : 50;
  for (int s = 0; s < count; ++s) {
    const std::uint64_t seed = 500 + s;
    const std::string tag = "seed " + std::to_string(seed);
    CertifiedPair pair = random_certified_pair(mesh, Field::Complex, 1, seed);
    ReductionParams params;
    params.seed = seed;
    ReductionOutcome out = all_units_reduce(pair.f, pair.g, params);
    t.check(out.ok, tag + ": reduction failed");
    if (!out.ok) continue;
    const ReductionWitness& w = out.witness;
    for (int j = 0; j < w.multiplier.n(); ++j) {
      MinModulusResult mm = min_modulus_pl(PLTuple({w.multiplier[j]}));
      t.check(mm.value >= 0.5 - 1e-8,
              tag + ": component min modulus fell below 1/2");
    }
    t.check(w.thresholds.floor > 0.0 || w.thresholds.delta_prime > 0.0,
            tag + ": no positive certified reduced minimum");
    t.check(verify_witness(pair.f, pair.g, w).ok,
            tag + ": witness did not re-verify");
    r.documents.push_back(
        pl_document(Operation::AllUnits, pair.f, pair.g, params, out));
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(count) + " instances");
  return r;
}

// -------------------------------------------------------------------------
// criterion 6: unitary reduction
// -------------------------------------------------------------------------

CorpusResult run_c6(bool quick) {
  CorpusResult r;
  r.name = "unitary-interval";
  r.criterion = 6;
  Tally t;
  MeshPtr mesh = build_mesh(ShapeTag::Interval, 32);
  const int count = quick ? 10 : 50;
  for (int s = 0; s < count; ++s) {
    const std::uint64_t seed = 600 + s;
    const std::string tag = "seed " + std::to_string(seed);
    CertifiedPair pair = random_certified_pair(mesh, Field::Complex, 1, seed);
    ReductionParams params;
    params.seed = seed;
    ReductionOutcome out = unitary_reduce(pair.f, pair.g, params);
    t.check(out.ok, tag + ": reduction failed");
    if (!out.ok) continue;
    const ReductionWitness& w = out.witness;
    MinModulusResult mm = min_modulus_pl(w.multiplier);
    t.check(mm.cert.value > 0.0, tag + ": multiplier tuple is not invertible");
    t.check(w.thresholds.floor > 0.0 || w.thresholds.delta_prime > 0.0,
            tag + ": no positive certified reduced minimum");
    t.check(verify_witness(pair.f, pair.g, w).ok,
            tag + ": witness did not re-verify");
    r.documents.push_back(
        pl_document(Operation::Unitary, pair.f, pair.g, params, out));
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(count) + " instances");
  return r;
}

// -------------------------------------------------------------------------
// criterion 7: stabilization m = 3 -> n = 1
// -------------------------------------------------------------------------

CorpusResult run_c7(bool quick) {
  CorpusResult r;
  r.name = "stabilize-three-to-one";
  r.criterion = 7;
  Tally t;
  MeshPtr mesh = build_mesh(ShapeTag::Interval, 32);
  const int count = quick ? 5 : 25;
  for (int s = 0; s < count; ++s) {
    const std::uint64_t seed = 700 + s;
    const std::string tag = "seed " + std::to_string(seed);
    CertifiedPair pair = random_certified_pair(mesh, Field::Complex, 3, seed);
    ReductionParams params;
    params.seed = seed;
    ReductionOutcome out = stabilize_reduce(pair.f, pair.g, 1, params);
    t.check(out.ok, tag + ": reduction failed");
    if (!out.ok) continue;
    const ReductionWitness& w = out.witness;
    t.check(w.stabilize_n == 1, tag + ": recorded target length is wrong");
    for (int j = 1; j < w.multiplier.n(); ++j) {
      bool ones = true;
      for (int v = 0; v < w.multiplier[j].size() && ones; ++v) {
        const Complex z = w.multiplier[j].value(v);
        ones = z.real() == 1.0 && z.imag() == 0.0;
      }
      t.check(ones, tag + ": trailing component is not identically 1");
    }
    MinModulusResult mm = min_modulus_pl(w.multiplier);
    t.check(mm.cert.value > 0.0, tag + ": multiplier tuple is not invertible");
    t.check(w.thresholds.floor > 0.0 || w.thresholds.delta_prime > 0.0,
            tag + ": no positive certified reduced minimum");
    t.check(verify_witness(pair.f, pair.g, w).ok,
            tag + ": witness did not re-verify");
    r.documents.push_back(pl_document(Operation::Stabilize, pair.f, pair.g,
                                      params, out, /*stabilize_n=*/1));
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(count) + " instances");
  return r;
}

// -------------------------------------------------------------------------
// criterion 8: invertible approximation of scalar functions
// -------------------------------------------------------------------------

CorpusResult run_c8(bool quick) {
  CorpusResult r;
  r.name = "approx-invertible-scalar";
  r.criterion = 8;
  Tally t;
  MeshPtr mesh = build_mesh(ShapeTag::Interval, 64);
  const int count = quick ? 20 : 100;
  const double eps = 0.05;
  for (int s = 0; s < count; ++s) {
    const std::string tag = "seed " + std::to_string(800 + s);
    Rng rng(800 + s);
    std::vector<Complex> vals(static_cast<std::size_t>(mesh->vertex_count()));
    for (auto& z : vals) z = rng.unit_disk();
    PLFunction h(mesh, Field::Complex, std::move(vals));
    Rng arng = rng.fork(1);
    ApproxResult res = approx_invertible(PLTuple({h}), eps, arng, 24);
    t.check(res.ok, tag + ": no invertible approximation found");
    if (!res.ok) continue;
    t.check(res.cert.value > 0.0, tag + ": accepted tuple has zero minimum");
    t.check(sup_norm(pl_sub(res.u[0], h)) < eps,
            tag + ": approximation left the norm ball");
  }
  {
    // Real field obstruction: a sign change pins a zero on every function
    // within distance eps, so the search must report an honest failure.
    PLFunction x = PLFunction::coordinate(mesh, Field::Real, 0);
    PLFunction f =
        pl_shift(pl_scale(x, Complex(2.0, 0.0)), Complex(-1.0, 0.0));
    Rng rng(899);
    ApproxResult res = approx_invertible(PLTuple({f}), eps, rng, 24);
    t.check(!res.ok,
            "sign-changing real function was approximated by a unit");
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(count) + " draws + obstruction");
  return r;
}

// -------------------------------------------------------------------------
// criterion 9: Moebius containment over the parameter grid
// -------------------------------------------------------------------------

CorpusResult run_c9(bool quick) {
  CorpusResult r;
  r.name = "mobius-containment";
  r.criterion = 9;
  Tally t;
  const int samples = quick ? 2000 : 10000;
  const double pi = 3.14159265358979323846;
  int pairs = 0;
  for (int ei = 1; ei <= 9; ++ei) {
    for (double epsv : {0.02, 0.1, 0.2, 0.35, 0.5}) {
      const double eta = 0.1 * ei;
      ++pairs;
      const disk::MobiusParams mob = disk::mobius_param(eta, epsv);
      const std::string tag =
          "eta " + std::to_string(eta) + " eps " + std::to_string(epsv);
      Rng rng(Rng(900).fork(static_cast<std::uint64_t>(pairs)));
      auto probe = [&](Complex z) {
        const Complex la = (z - mob.a) / (1.0 - mob.a * z);
        if (modulus(la + 1.0) < epsv)
          t.ok_one();
        else
          t.fail_one(tag + ": containment failed at z = (" +
                     std::to_string(z.real()) + ", " +
                     std::to_string(z.imag()) + ")");
      };
      // The corner cases first: circle points at the critical distance, the
      // radial point, and the antipode.
      const double ct = std::clamp(1.0 - eta * eta / 2.0, -1.0, 1.0);
      const double th0 = std::acos(ct);
      probe(Complex(std::cos(th0), std::sin(th0)));
      probe(Complex(std::cos(th0), -std::sin(th0)));
      probe(Complex(1.0 - eta, 0.0));
      probe(Complex(-1.0, 0.0));
      for (int i = 4; i < samples; ++i) {
        Complex z;
        if (i % 4 == 0) {
          do {
            z = rng.unit_circle();
          } while (modulus(z - 1.0) < eta);
        } else if (i % 4 == 1) {
          // A point of the critical ring |z - 1| = eta inside the disk.
          Complex cand;
          int guard = 0;
          do {
            const double phi = rng.uniform(0.0, 2.0 * pi);
            cand = Complex(1.0 + eta * std::cos(phi), eta * std::sin(phi));
          } while (modulus(cand) > 1.0 && ++guard < 64);
          z = modulus(cand) <= 1.0 ? cand : Complex(1.0 - eta, 0.0);
        } else {
          do {
            z = rng.unit_disk();
          } while (modulus(z - 1.0) < eta);
        }
        probe(z);
      }
    }
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(pairs) + " parameter pairs x " +
                                 std::to_string(samples) + " samples");
  return r;
}

// -------------------------------------------------------------------------
// criterion 10: disk-algebra norm-one reduction on the pinned instance
// -------------------------------------------------------------------------

CorpusResult run_c10(bool quick) {
  (void)quick;  // the instance is fixed; there is no scale to shrink
  CorpusResult r;
  r.name = "disk-norm-one";
  r.criterion = 10;
  Tally t;
  disk::DiskTuple f;
  f.comps = {disk::element(disk::Poly::z()),
             disk::element(disk::Poly{{Complex(1.0, 0.0), Complex(-2.0, 0.0)}})};
  disk::DiskElement g =
      disk::element(disk::Poly{{Complex(-0.5, 0.0), Complex(0.5, 0.0)}});
  for (int variant = 0; variant < 2; ++variant) {
    const std::string tag = variant == 0 ? "y = 0" : "y = constants";
    disk::DiskTuple y;
    if (variant == 0)
      y.comps = {disk::element(disk::Poly::zero()),
                 disk::element(disk::Poly::zero())};
    else
      y.comps = {disk::element(disk::Poly::constant(Complex(0.1, 0.0))),
                 disk::element(disk::Poly::constant(Complex(0.0, -0.1)))};
    disk::DiskParams params;
    params.seed = 0;
    const auto t0 = Clock::now();
    disk::DiskOutcome out = disk::disk_norm_one_reduce(f, g, y, params);
    const double dt = seconds_since(t0);
    t.check(out.ok, tag + ": reduction failed");
    if (!out.ok) continue;
    const disk::DiskWitness& w = out.witness;
    t.check(static_cast<int>(w.sup_bounds.size()) == f.n(),
            tag + ": sup enclosure count mismatch");
    for (const disk::BoundPair& b : w.sup_bounds) {
      t.check(b.lower >= 1.0 - 1e-6, tag + ": sup-norm lower bound off 1");
      t.check(b.upper <= 1.0 + 1e-6, tag + ": sup-norm upper bound off 1");
    }
    for (int j = 0; j < w.multiplier.n(); ++j)
      t.check(std::abs(modulus(de_eval(w.multiplier[j], Complex(1.0, 0.0))) -
                       1.0) <= 1e-9,
              tag + ": peak value at z = 1 misses 1");
    t.check(w.floor > 0.0, tag + ": no positive certified reduced minimum");
    t.check(disk::disk_verify_witness(f, g, w, params.options).ok,
            tag + ": witness did not re-verify");
    t.check(dt < 5.0, tag + ": runtime budget exceeded");

    WitnessDocument doc;
    doc.problem.operation = Operation::DiskNormOne;
    doc.problem.algebra = "disk";
    doc.problem.field = Field::Complex;
    doc.problem.disk_f = f;
    doc.problem.disk_g = g;
    doc.problem.disk_y = y;
    doc.problem.params.epsilon = params.epsilon;
    doc.problem.params.seed = params.seed;
    doc.ok = true;
    doc.kind = "disk-reduction";
    doc.disk_reduction = w;
    strip_traces(doc);
    r.documents.push_back(witness_to_json(doc));
  }
  r.pass = t.pass();
  r.detail = count_detail(t, "2 witness inputs");
  return r;
}

// -------------------------------------------------------------------------
// criterion 11: certification soundness probes
// -------------------------------------------------------------------------

CorpusResult run_c11(bool quick) {
  CorpusResult r;
  r.name = "certification-soundness";
  r.criterion = 11;
  Tally t;

  // Part one: lower bounds from the subdivision certifier must never exceed
  // a sampled magnitude of the true (piecewise-quadratic) expression.
  const int nexpr = quick ? 40 : 200;
  const int nsamples = 50;
  MeshPtr interval = build_mesh(ShapeTag::Interval, 24);
  MeshPtr torus = build_mesh(ShapeTag::Torus, 4);
  long long conclusive = 0;
  for (int e = 0; e < nexpr; ++e) {
    Rng rng(1100 + e);
    MeshPtr mesh = (e % 2 == 0) ? interval : torus;
    QuadExpr expr;
    expr.components.resize(static_cast<std::size_t>(rng.uniform_int(1, 2)));
    for (auto& comp : expr.components) {
      const int nterm = rng.uniform_int(1, 3);
      for (int k = 0; k < nterm; ++k) {
        QuadTerm term;
        term.coeff = rng.uniform(0.2, 1.5) * rng.unit_circle();
        term.a = random_pl_function(mesh, Field::Complex, rng, 0.1, 1.0);
        if (rng.uniform01() < 0.5)
          term.b = random_pl_function(mesh, Field::Complex, rng, 0.1, 1.0);
        comp.push_back(std::move(term));
      }
      // A constant offset keeps many draws bounded away from zero, so the
      // certified lower bound is usually strictly positive and the probe
      // actually bites.
      QuadTerm offset;
      offset.coeff = rng.uniform(0.2, 1.2) * rng.unit_circle();
      comp.push_back(std::move(offset));
    }
    CertifyOptions copt;
    copt.keep_trace = false;
    BernsteinOutcome bo = certify_min_modulus_expr(expr, 0.0, copt);
    if (bo.ok) ++conclusive;
    const double bound = bo.cert.value;
    for (int i = 0; i < nsamples; ++i) {
      MeshPoint pt = sample_point(*mesh, rng);
      if (expr.magnitude(pt) >= bound - 1e-12)
        t.ok_one();
      else
        t.fail_one("expression " + std::to_string(e) +
                   ": certified bound exceeds a sampled magnitude");
    }
  }

  // Part two: certified winding numbers against polynomials with known
  // zeros.  Roots are drawn off the circle and the draw is rejected when
  // the coefficient-sum budget provably cannot reach a decisive sample
  // count, keeping every accepted instance certifiable.
  const int npoly = quick ? 200 : 1000;
  long long rejected = 0;
  for (int i = 0; i < npoly; ++i) {
    Rng rng(1200 + i);
    disk::Poly p;
    int inside = 0;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 500) {
        p = disk::Poly::one();
        inside = 0;
        break;
      }
      const int deg = rng.uniform_int(0, 6);
      const Complex lead = rng.uniform(0.5, 2.0) * rng.unit_circle();
      std::vector<Complex> roots;
      roots.reserve(static_cast<std::size_t>(deg));
      double pred_lower = modulus(lead);
      double pred_s1 = modulus(lead);
      int count_in = 0;
      for (int k = 0; k < deg; ++k) {
        const bool in = rng.uniform01() < 0.55;
        const double m =
            in ? rng.uniform(0.2, 0.99) : rng.uniform(1.01, 1.9);
        roots.push_back(m * rng.unit_circle());
        pred_lower *= std::abs(1.0 - m);
        pred_s1 *= 1.0 + m;
        if (in) ++count_in;
      }
      if (pred_lower * static_cast<double>(1 << 21) < 128.0 * pred_s1) {
        ++rejected;
        continue;
      }
      p = disk::Poly{{lead}};
      for (const Complex& root : roots)
        p = disk::p_mul(p, disk::Poly{{-root, Complex(1.0, 0.0)}});
      inside = count_in;
      break;
    }
    disk::WindingResult wr = disk::disk_winding(p);
    if (!wr.decisive)
      t.fail_one("polynomial " + std::to_string(i) +
                 ": winding not decisive (" + wr.reason + ")");
    else if (wr.winding != inside)
      t.fail_one("polynomial " + std::to_string(i) + ": winding " +
                 std::to_string(wr.winding) + " but " +
                 std::to_string(inside) + " zeros inside");
    else
      t.ok_one();
  }

  r.pass = t.pass();
  r.detail = count_detail(
      t, std::to_string(nexpr) + " expressions x " +
             std::to_string(nsamples) + " probes (" +
             std::to_string(conclusive) + " conclusive), " +
             std::to_string(npoly) + " windings (" +
             std::to_string(rejected) + " draws rejected)");
  return r;
}

// -------------------------------------------------------------------------
// criterion 12: double-run determinism of the document producers
// -------------------------------------------------------------------------

CorpusResult run_c12(bool quick) {
  (void)quick;  // always exercises the reduced-scale double run
  CorpusResult r;
  r.name = "determinism-double-run";
  r.criterion = 12;
  Tally t;
  long long docs = 0;
  for (int crit : {1, 2, 3, 4, 5, 6, 7, 10}) {
    const CorpusEntry* entry = nullptr;
    for (const auto& e : corpus_entries())
      if (e.criterion == crit) {
        entry = &e;
        break;
      }
    if (!entry) {
      t.fail_one("criterion " + std::to_string(crit) + " entry missing");
      continue;
    }
    CorpusResult a = entry->run(true);
    CorpusResult b = entry->run(true);
    t.check(a.documents == b.documents,
            "criterion " + std::to_string(crit) +
                ": documents differ between identical runs");
    t.check(a.pass == b.pass && a.detail == b.detail,
            "criterion " + std::to_string(crit) +
                ": summary line differs between identical runs");
    docs += static_cast<long long>(a.documents.size());
  }
  r.pass = t.pass();
  r.detail = count_detail(t, std::to_string(docs) + " documents compared");
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------------

PLFunction random_pl_function(const MeshPtr& mesh, Field field, Rng& rng,
                              double lo_mod, double hi_mod) {
  const int nv = mesh->vertex_count();
  std::vector<Complex> vals(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    const double m = rng.uniform(lo_mod, hi_mod);
    if (field == Field::Real)
      vals[v] = Complex(rng.uniform01() < 0.5 ? -m : m, 0.0);
    else
      vals[v] = m * rng.unit_circle();
  }
  return PLFunction(mesh, field, std::move(vals));
}

CertifiedPair random_certified_pair(const MeshPtr& mesh, Field field, int n,
                                    std::uint64_t seed, double min_joint,
                                    const CertifyOptions& opt) {
  for (int draw = 0; draw < 256; ++draw) {
    Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(draw));
    std::vector<PLFunction> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      comps.push_back(random_pl_function(mesh, field, rng));
    PLFunction g = random_pl_function(mesh, field, rng);
    PLTuple f(std::move(comps));
    MinModulusResult mm = min_modulus_pl(join(f, g), opt);
    if (mm.value >= min_joint)
      return {std::move(f), std::move(g), std::move(mm.cert), mm.value,
              draw + 1};
  }
  throw std::runtime_error(
      "random_certified_pair: no draw cleared the joint minimum");
}

CertifiedPair random_vanishing_pair(const MeshPtr& mesh, Field field, int n,
                                    std::uint64_t seed, int vanish_vertex,
                                    double min_joint,
                                    const CertifyOptions& opt) {
  Rng pick = Rng(seed).fork(0xfeedULL);
  const int nv = mesh->vertex_count();
  const int vz =
      vanish_vertex >= 0 ? vanish_vertex : pick.uniform_int(0, nv - 1);
  for (int draw = 0; draw < 256; ++draw) {
    Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(draw));
    std::vector<PLFunction> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      comps.push_back(random_pl_function(mesh, field, rng));
    std::vector<Complex> gv = random_pl_function(mesh, field, rng).values();
    gv[vz] = Complex(0.0, 0.0);
    PLFunction g(mesh, field, std::move(gv));
    PLTuple f(std::move(comps));
    MinModulusResult mm = min_modulus_pl(join(f, g), opt);
    if (mm.value >= min_joint)
      return {std::move(f), std::move(g), std::move(mm.cert), mm.value,
              draw + 1};
  }
  throw std::runtime_error(
      "random_vanishing_pair: no draw cleared the joint minimum");
}

CertifiedPair random_positive_g_pair(const MeshPtr& mesh, Field field, int n,
                                     std::uint64_t seed,
                                     const CertifyOptions& opt) {
  for (int draw = 0; draw < 256; ++draw) {
    Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(draw));
    std::vector<PLFunction> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      comps.push_back(random_pl_function(mesh, field, rng));
    // Independent vertex phases let |g| collapse inside an edge whenever two
    // adjacent values land near-antipodally, which would route every draw to
    // the vanishing branch.  A narrow phase band keeps the interpolant's
    // modulus near the vertex moduli, so g stays well clear of zero.
    PLFunction g = [&] {
      const int nv = mesh->vertex_count();
      const double base = rng.uniform(0.0, 6.283185307179586);
      std::vector<Complex> gv(static_cast<std::size_t>(nv));
      for (int v = 0; v < nv; ++v) {
        const double m = rng.uniform(0.6, 1.0);
        const double ph = base + rng.uniform(-0.3, 0.3);
        gv[v] = field == Field::Real
                    ? Complex(m, 0.0)
                    : Complex(m * std::cos(ph), m * std::sin(ph));
      }
      return PLFunction(mesh, field, std::move(gv));
    }();
    PLTuple f(std::move(comps));
    MinModulusResult gm = min_modulus_pl(PLTuple({g}), opt);
    if (!(gm.cert.value > 0.0)) continue;
    MinModulusResult mm = min_modulus_pl(join(f, g), opt);
    if (mm.value < 0.05) continue;
    // |g| must clear the sublevel radius the reduction derives from the
    // joint minimum, which routes the run to the subtuple branch.
    const double radius =
        std::min(0.5 * mm.value,
                 mm.value * std::sqrt(3.0) / (4.0 * std::sqrt(double(n))));
    if (gm.value >= radius)
      return {std::move(f), std::move(g), std::move(mm.cert), mm.value,
              draw + 1};
  }
  throw std::runtime_error(
      "random_positive_g_pair: no draw kept |g| above the sublevel radius");
}

// ---------------------------------------------------------------------------
// corpus
// ---------------------------------------------------------------------------

const std::vector<CorpusEntry>& corpus_entries() {
  static const std::vector<CorpusEntry> entries = [] {
    const std::vector<std::string> pl = {"pl-quick", "pl-full", "all"};
    const std::vector<std::string> both = {"pl-quick", "pl-full", "disk",
                                           "all"};
    std::vector<CorpusEntry> v;
    v.push_back({"norm-one-interval", 1, pl, run_c1});
    v.push_back({"norm-one-vanishing", 2, pl, run_c2});
    v.push_back({"norm-one-torus-subtuple", 3, pl, run_c3});
    v.push_back({"small-norm-interval", 4, pl, run_c4});
    v.push_back({"all-units-interval", 5, pl, run_c5});
    v.push_back({"unitary-interval", 6, pl, run_c6});
    v.push_back({"stabilize-three-to-one", 7, pl, run_c7});
    v.push_back({"approx-invertible-scalar", 8, pl, run_c8});
    v.push_back({"mobius-containment", 9, {"disk", "all"}, run_c9});
    v.push_back({"disk-norm-one", 10, {"disk", "all"}, run_c10});
    v.push_back({"certification-soundness", 11, both, run_c11});
    v.push_back({"determinism-double-run", 12, {"all"}, run_c12});
    return v;
  }();
  return entries;
}

std::vector<CorpusResult> run_corpus(const std::string& subset) {
  if (subset != "pl-quick" && subset != "pl-full" && subset != "disk" &&
      subset != "all")
    throw std::invalid_argument("unknown corpus subset: " + subset);
  const auto& all = corpus_entries();
  std::vector<int> picked;
  for (int i = 0; i < static_cast<int>(all.size()); ++i)
    if (std::find(all[i].subsets.begin(), all[i].subsets.end(), subset) !=
        all[i].subsets.end())
      picked.push_back(i);
  const bool quick = subset == "pl-quick";

  std::vector<CorpusResult> results(picked.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= picked.size()) return;
      const CorpusEntry& e = all[static_cast<std::size_t>(picked[i])];
      CorpusResult res;
      const auto t0 = Clock::now();
      try {
        res = e.run(quick);
      } catch (const std::exception& ex) {
        res.name = e.name;
        res.criterion = e.criterion;
        res.pass = false;
        res.detail = std::string("exception: ") + ex.what();
      }
      res.elapsed_seconds = seconds_since(t0);
      results[i] = std::move(res);
    }
  };

  int threads = 0;
  if (const char* env = std::getenv("STABLERANK_THREADS"))
    threads = std::atoi(env);
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(picked.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

std::string corpus_summary(const std::vector<CorpusResult>& results) {
  std::string s;
  bool all_pass = true;
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  long long docs = 0;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    s += r.pass ? "[PASS]" : "[FAIL]";
    s += " criterion " + std::to_string(r.criterion) + ": " + r.name;
    if (!r.detail.empty()) s += " - " + r.detail;
    s += "\n";
    for (const auto& d : r.documents) {
      digest = fnv1a(d, digest);
      ++docs;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(digest));
  s += "documents: " + std::to_string(docs) + "\n";
  s += "digest: " + std::string(buf) + "\n";
  s += all_pass ? "result: PASS\n" : "result: FAIL\n";
  return s;
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t state) {
  for (unsigned char ch : bytes) {
    state ^= ch;
    state *= 0x100000001b3ULL;
  }
  return state;
}

}  // namespace stablerank
