#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stablerank/pl.hpp"

namespace stablerank {

/// What a certificate asserts about its target expression.
enum class CertKind {
  ExactMin,            // value == global min of a PL tuple magnitude
  BernsteinLowerBound, // value <= global min of a piecewise-quadratic form
  SupNorm,             // value == exact sup norm (vertex max rule)
  Composite            // conjunction of child certificates + derived facts
};

const char* cert_kind_name(CertKind kind);

/// Per-top-simplex record of the bound established there.
struct SimplexBound {
  int simplex = 0;
  double lower_bound = 0.0;   // rigorous lower bound on this simplex
  double dual_gap = 0.0;      // exact-min path: primal minus dual bound
  int subdivisions = 0;       // Bernstein path: cells processed
};

/// Machine-checkable record of one certified numeric fact.
struct Certificate {
  CertKind kind = CertKind::ExactMin;
  double value = 0.0;          // the certified bound / exact quantity
  std::string target;          // structural description of the expression
  std::vector<SimplexBound> trace;
  std::vector<std::string> facts;   // derived inequalities (composite kind)
  std::vector<Certificate> parts;   // sub-certificates (composite kind)
  int refinements_used = 0;
};

/// Knobs for the certification routines.  `guard` is the fixed relative
/// shrink applied to every certified lower bound before it is compared or
/// reported, absorbing accumulated rounding of the coefficient pipeline.
struct CertifyOptions {
  double guard = 1e-8;
  int max_cells = 200000;       // Bernstein work budget (total cells)
  int max_depth = 48;           // Bernstein subdivision depth per simplex
  bool outward_intervals =
#ifdef STABLERANK_INTERVAL_BERNSTEIN_DEFAULT
      true;
#else
      false;
#endif
  bool keep_trace = true;
};

/// Result of the exact PL minimum computation.
struct MinModulusResult {
  double value = 0.0;    // exact global minimum of the tuple magnitude
  Certificate cert;      // cert.value is the certified dual lower bound;
                         // invertibility decisions must use it, not `value`,
                         // which can carry rounding dust at a true zero
  MeshPoint argmin;      // a point attaining the minimum
};

/// Exact global minimum of |t| = sqrt(sum |t_j|^2) over the mesh.
///
/// On each top simplex the tuple image is the convex hull of the vertex
/// value points, so the minimum is the distance from the origin to that
/// hull, computed exactly by enumerating hull faces (small KKT systems).  A
/// feasible dual point provides an independent lower bound per simplex; the
/// gap is recorded in the trace.
MinModulusResult min_modulus_pl(const PLTuple& t,
                                const CertifyOptions& opt = {});

/// One additive term of a component: coeff * a * b, where either factor may
/// be absent (absent a and b means a constant term).
struct QuadTerm {
  Complex coeff{1.0, 0.0};
  std::optional<PLFunction> a;
  std::optional<PLFunction> b;
};

/// Vector-valued expression whose components are sums of products of at most
/// two PL functions — exactly the shape produced by the reductions
/// (f + multiplier * g and friends).  All functions share one mesh.
struct QuadExpr {
  std::vector<std::vector<QuadTerm>> components;
  std::string describe;

  MeshPtr mesh() const;
  /// Evaluate the true (piecewise-quadratic) expression at a mesh point.
  std::vector<Complex> eval(const MeshPoint& point) const;
  /// Aggregate Euclidean magnitude at a point.
  double magnitude(const MeshPoint& point) const;
};

/// Convenience builders.
QuadExpr expr_from_tuple(const PLTuple& t, std::string describe = {});
/// Components f_j + v_j * g.
QuadExpr expr_linear_combination(const PLTuple& f, const PLTuple& v,
                                 const PLFunction& g,
                                 std::string describe = {});
/// Scalar expression sum_j u_j * a_j (+ extra terms appended by caller).
QuadExpr expr_dot(const PLTuple& u, const PLTuple& a,
                  std::string describe = {});

/// Outcome of a Bernstein-form certification run.
struct BernsteinOutcome {
  bool ok = false;
  Certificate cert;                 // kind BernsteinLowerBound
  std::vector<int> offending;      // top simplices that exhausted the budget
  long long cells_processed = 0;
};

/// Certify min over the mesh of the aggregate magnitude of `expr` >= floor.
///
/// Per top simplex the squared magnitude is a degree-4 polynomial in
/// barycentric coordinates; its Bernstein coefficients bound it from below
/// (one-sided soundness).  Cells failing the bound are subdivided at edge
/// midpoints until they pass, provably cannot pass (a corner value already
/// sits below the floor), or the budget runs out — the latter returns
/// ok=false with the offending simplices listed, never a weakened bound.
/// With floor == 0 the run certifies strict positivity.
BernsteinOutcome certify_min_modulus_expr(const QuadExpr& expr, double floor,
                                          const CertifyOptions& opt = {});

/// Same certification restricted to a subset of top simplices (indices into
/// the mesh simplex list).  An empty subset is vacuously certified with the
/// floor itself as the reported bound.
BernsteinOutcome certify_min_modulus_expr(const QuadExpr& expr, double floor,
                                          const CertifyOptions& opt,
                                          const std::vector<int>& simplices);

/// Invertibility decision for a PL tuple (exact path).
struct InvertibleResult {
  bool invertible = false;
  bool conclusive = true;
  Certificate cert;
  std::vector<int> offending;  // budget-exhausted simplices (Bernstein path)
};

InvertibleResult check_invertible(const PLTuple& t,
                                  const CertifyOptions& opt = {});

/// Invertibility decision for a quadratic expression (Bernstein path).  If
/// every product term is degenerate (a factor identically zero or absent)
/// the expression is PL and the exact path runs instead; the certificate
/// target records which path ran.  A budget exhaustion yields
/// invertible=false with conclusive=false.
InvertibleResult check_invertible(const QuadExpr& expr,
                                  const CertifyOptions& opt = {});

/// Exact sup-norm certificate (vertex max rule).
Certificate certify_sup_norm(const PLFunction& f, std::string target = {});

}  // namespace stablerank
