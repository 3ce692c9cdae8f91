#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stablerank/certify.hpp"

namespace stablerank {

/// Which reduction produced a witness.
enum class WitnessKind { SmallNorm, NormOne, AllUnits, Unitary, Stabilize };

const char* witness_kind_name(WitnessKind kind);
WitnessKind witness_kind_from_name(const std::string& name);

/// Input knobs shared by the reductions.
struct ReductionParams {
  double epsilon = 0.5;     // multiplier norm budget where applicable
  int max_retries = 12;     // random re-seeds per mesh level
  int max_refinements = 3;  // global mesh refinements before giving up
  std::uint64_t seed = 0;
  int approx_attempts = 24;  // perturbation draws inside approx_invertible
  CertifyOptions certify;
};

/// Quantities derived from the certified input minima, recorded for audit.
struct DerivedThresholds {
  double c = 0.0;            // certified joint minimum of (f, g)
  double t_inner = 0.0;      // cutoff is exactly 1 on {|g| <= t_inner}
  double t_outer = 0.0;      // cutoff is exactly 0 on {|g| >= t_outer}
  double delta = 0.0;        // lower bound for |f| on {|g| <= t_outer}
  double delta_prime = 0.0;  // certified min of the intermediate tuple
  double floor = 0.0;        // certified floor of the reduced tuple over the
                             // cutoff cover (simplices with a vertex where
                             // |g| < t_outer); off the cover the multiplier
                             // coincides with the small-norm one and the
                             // reduction is certified strictly positive
};

/// Self-contained certified reduction result.
struct ReductionWitness {
  WitnessKind kind = WitnessKind::SmallNorm;
  PLTuple multiplier;
  /// Vertex-value snapshot of the reduced tuple (components f_j +
  /// multiplier_j * g evaluated at vertices; the certificates target the
  /// full piecewise-quadratic expression rebuilt from f, multiplier, g).
  PLTuple reduced;
  std::vector<Certificate> certificates;
  ReductionParams params;
  DerivedThresholds thresholds;
  int refinements_used = 0;
  int retries_used = 0;
  /// Algorithm branch: 1/2 for the small-norm cases, 1/2/3 for the norm-one
  /// cases A/B/C, 0 when the operation has a single path.
  int case_label = 0;
  std::vector<int> subtuple;     // kept component indices (norm-one case C)
  int designated_vertex = -1;    // vertex with |v_j| == 1 (norm-one case B)
  int stabilize_n = 0;           // target length for the stabilize operation
};

struct ReductionFailure {
  std::string reason;
  int retries_used = 0;
  int refinements_used = 0;
  std::vector<int> offending;  // simplices that exhausted a budget, if any
  // Deterministic gate that only a finer mesh can clear: the retry ladder
  // skips the remaining re-seeds at this level and refines immediately.
  bool needs_refinement = false;
};

/// Either a certified witness or an honest failure (never a weakened bound).
struct ReductionOutcome {
  bool ok = false;
  ReductionWitness witness;
  ReductionFailure failure;
};

/// Result of the invertible-approximation search.
struct ApproxResult {
  bool ok = false;
  PLTuple u;
  Certificate cert;   // exact-min certificate of the accepted tuple
  int attempts = 0;
};

/// Search for an invertible tuple u with sup_norm(u_j - h_j) < eps for
/// every component.  Tries h itself, then a deterministic real shift of
/// eps/2, then random vertex perturbations of magnitude <= eps/2 with a
/// shrinking radius.  An optional mask (real values in [0,1]) scales the
/// perturbation vertex-wise, so masked-out vertices are left untouched.
ApproxResult approx_invertible(const PLTuple& h, double eps, Rng& rng,
                               int max_attempts,
                               const PLFunction* mask = nullptr,
                               const CertifyOptions& opt = {});

/// Multiplier a with sup_norm(a_j) <= epsilon (exactly, vertex-max rule) and
/// f + a*g certified invertible.  Requires (f, ..., g) certified invertible.
ReductionOutcome small_norm_reduce(const PLTuple& f, const PLFunction& g,
                                   double epsilon,
                                   const ReductionParams& params);

/// Multiplier v with sup_norm(v_j) == 1 exactly and f + v*g certified
/// invertible.  Case A divides by g, case B blends a cutoff with a
/// small-norm multiplier (keeping one designated vertex at modulus exactly
/// one), case C normalizes a minimal invertible subtuple.
ReductionOutcome norm_one_reduce(const PLTuple& f, const PLFunction& g,
                                 const ReductionParams& params);

/// Multiplier u whose components are separately certified invertible with
/// min modulus >= 1/2.  params.epsilon is the internal small-norm budget
/// (default 1/2) and must be < 1, or components could vanish.
ReductionOutcome all_units_reduce(const PLTuple& f, const PLFunction& g,
                                  const ReductionParams& params);

/// Multiplier w certified invertible as a tuple with a + w*b certified
/// invertible.  Tries the all-ones multiplier first.
ReductionOutcome unitary_reduce(const PLTuple& a, const PLFunction& b,
                                const ReductionParams& params);

/// Reduce an m-tuple problem to length n (< m): multiplier c has its last
/// m-n components identically 1 and is certified invertible.  For m == n
/// the operation delegates to small_norm_reduce.
ReductionOutcome stabilize_reduce(const PLTuple& f, const PLFunction& g,
                                  int n, const ReductionParams& params);

struct SubtupleResult {
  std::vector<int> indices;  // ascending
  Certificate cert;          // exact-min certificate of the kept subtuple
};

/// Greedy minimal invertible subtuple: drop indices in descending order
/// whenever the remainder stays certified invertible.  Monotonicity of the
/// pointwise magnitude makes the greedy result minimal (no proper invertible
/// subset exists).  Throws std::domain_error if u is not invertible.
SubtupleResult minimal_invertible_subtuple(const PLTuple& u,
                                           const CertifyOptions& opt = {});

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Re-run every certification of a witness from scratch against the original
/// problem (f, g), replaying the recorded number of global refinements.  No
/// random state is needed.
VerifyReport verify_witness(const PLTuple& f, const PLFunction& g,
                            const ReductionWitness& witness);

}  // namespace stablerank
