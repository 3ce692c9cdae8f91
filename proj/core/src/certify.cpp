#include "stablerank/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stablerank {

const char* cert_kind_name(CertKind kind) {
  switch (kind) {
    case CertKind::ExactMin: return "exact-min";
    case CertKind::BernsteinLowerBound: return "bernstein-lower-bound";
    case CertKind::SupNorm: return "sup-norm";
    case CertKind::Composite: return "composite";
  }
  return "exact-min";
}

namespace {

/// Dense Gaussian elimination with partial pivoting.  Returns false when a
/// pivot collapses relative to the matrix scale (singular system).
bool solve_dense(std::vector<double> A, std::vector<double> rhs, int n,
                 std::vector<double>& x) {
  double scale = 0.0;
  for (double v : A) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  const double tiny = scale * 1e-13;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r * n + col]) > std::abs(A[pivot * n + col])) pivot = r;
    if (std::abs(A[pivot * n + col]) <= tiny) return false;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(A[pivot * n + c], A[col * n + c]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = A[r * n + col] / A[col * n + col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= A[r * n + c] * x[c];
    x[r] = acc / A[r * n + r];
  }
  return true;
}

struct SimplexMinOut {
  double min = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  std::vector<double> bary;  // barycentric weights of the minimizing point
};

/// Exact distance from the origin to the convex hull of `m` points in R^k
/// (flat array, stride k).  Every hull face is enumerated; the face optimum
/// solves a small KKT system, and any feasible candidate upper-bounds the
/// hull minimum, so the best feasible candidate is the exact minimum (every
/// hull point lies in the hull of an affinely independent subset).  A
/// supporting-hyperplane evaluation at the optimum gives the dual bound.
SimplexMinOut hull_min_distance(const std::vector<double>& pts, int m, int k) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_point(k, 0.0);
  std::vector<double> best_bary(m, 0.0);
  if (m > 0) best_bary[0] = 1.0;

  std::vector<int> subset;
  std::vector<double> A, rhs, sol, x(k);
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    subset.clear();
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) subset.push_back(i);
    const int t = static_cast<int>(subset.size());
    const int n = t + 1;
    A.assign(n * n, 0.0);
    rhs.assign(n, 0.0);
    rhs[t] = 1.0;
    for (int i = 0; i < t; ++i) {
      for (int j = 0; j < t; ++j) {
        double dot = 0.0;
        for (int c = 0; c < k; ++c)
          dot += pts[subset[i] * k + c] * pts[subset[j] * k + c];
        A[i * n + j] = 2.0 * dot;
      }
      A[i * n + t] = 1.0;
      A[t * n + i] = 1.0;
    }
    if (!solve_dense(A, rhs, n, sol)) continue;
    bool feasible = true;
    double sum = 0.0;
    for (int i = 0; i < t; ++i) {
      if (sol[i] < -1e-11) {
        feasible = false;
        break;
      }
      sol[i] = std::max(sol[i], 0.0);
      sum += sol[i];
    }
    if (!feasible || sum <= 0.0) continue;
    std::fill(x.begin(), x.end(), 0.0);
    for (int i = 0; i < t; ++i) {
      const double w = sol[i] / sum;
      for (int c = 0; c < k; ++c) x[c] += w * pts[subset[i] * k + c];
    }
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (norm < best) {
      best = norm;
      best_point = x;
      std::fill(best_bary.begin(), best_bary.end(), 0.0);
      for (int i = 0; i < t; ++i) best_bary[subset[i]] = sol[i] / sum;
    }
  }

  SimplexMinOut out;
  out.min = best;
  out.bary = best_bary;
  if (best > 0.0) {
    double lb = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double dot = 0.0;
      for (int c = 0; c < k; ++c) dot += best_point[c] * pts[i * k + c];
      lb = std::min(lb, dot / best);
    }
    out.dual = std::max(lb, 0.0);
  } else {
    out.dual = 0.0;
  }
  out.gap = out.min - out.dual;
  return out;
}

}  // namespace

MinModulusResult min_modulus_pl(const PLTuple& t, const CertifyOptions& opt) {
  const auto& mesh = *t.mesh();
  const int n = t.n();
  const int k = 2 * n;
  const int m = mesh.dimension + 1;

  MinModulusResult result;
  result.value = std::numeric_limits<double>::infinity();
  result.cert.kind = CertKind::ExactMin;
  result.cert.target = "min |tuple(n=" + std::to_string(n) + ")|";

  std::vector<double> pts(m * k);
  double dual = std::numeric_limits<double>::infinity();
  for (int s = 0; s < mesh.simplex_count(); ++s) {
    auto sx = mesh.simplex(s);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        const Complex z = t[j].value(sx[i]);
        pts[i * k + 2 * j] = z.real();
        pts[i * k + 2 * j + 1] = z.imag();
      }
    const SimplexMinOut sm = hull_min_distance(pts, m, k);
    if (sm.min < result.value) {
      result.value = sm.min;
      result.argmin.simplex = s;
      result.argmin.bary = sm.bary;
    }
    dual = std::min(dual, sm.dual);
    if (opt.keep_trace)
      result.cert.trace.push_back({s, sm.dual, sm.gap, 0});
  }
  // The primal minimizer can carry rounding dust (a hull through the origin
  // reports ~1e-18 instead of 0), so the certificate only vouches for the
  // supporting-hyperplane bound: positivity decisions must read cert.value.
  result.cert.value = std::max(0.0, std::min(dual, result.value));
  return result;
}

MeshPtr QuadExpr::mesh() const {
  for (const auto& comp : components)
    for (const auto& term : comp) {
      if (term.a) return term.a->mesh();
      if (term.b) return term.b->mesh();
    }
  throw std::invalid_argument("QuadExpr has no mesh-bound term");
}

std::vector<Complex> QuadExpr::eval(const MeshPoint& point) const {
  std::vector<Complex> out;
  out.reserve(components.size());
  for (const auto& comp : components) {
    Complex acc = 0.0;
    for (const auto& term : comp) {
      Complex v = term.coeff;
      if (term.a) v *= term.a->eval(point);
      if (term.b) v *= term.b->eval(point);
      acc += v;
    }
    out.push_back(acc);
  }
  return out;
}

double QuadExpr::magnitude(const MeshPoint& point) const {
  double sq = 0.0;
  for (const Complex& z : eval(point))
    sq += z.real() * z.real() + z.imag() * z.imag();
  return std::sqrt(sq);
}

QuadExpr expr_from_tuple(const PLTuple& t, std::string describe) {
  QuadExpr e;
  e.describe = describe.empty() ? "tuple" : std::move(describe);
  for (const auto& f : t.comps) {
    std::vector<QuadTerm> comp;
    comp.push_back({Complex{1.0, 0.0}, f, std::nullopt});
    e.components.push_back(std::move(comp));
  }
  return e;
}

QuadExpr expr_linear_combination(const PLTuple& f, const PLTuple& v,
                                 const PLFunction& g, std::string describe) {
  if (f.n() != v.n())
    throw std::invalid_argument(
        "expr_linear_combination: tuple sizes differ");
  QuadExpr e;
  e.describe = describe.empty() ? "f + v*g" : std::move(describe);
  for (int j = 0; j < f.n(); ++j) {
    std::vector<QuadTerm> comp;
    comp.push_back({Complex{1.0, 0.0}, f[j], std::nullopt});
    comp.push_back({Complex{1.0, 0.0}, v[j], g});
    e.components.push_back(std::move(comp));
  }
  return e;
}

QuadExpr expr_dot(const PLTuple& u, const PLTuple& a, std::string describe) {
  if (u.n() != a.n())
    throw std::invalid_argument("expr_dot: tuple sizes differ");
  QuadExpr e;
  e.describe = describe.empty() ? "sum u_j * a_j" : std::move(describe);
  std::vector<QuadTerm> comp;
  for (int j = 0; j < u.n(); ++j)
    comp.push_back({Complex{1.0, 0.0}, u[j], a[j]});
  e.components.push_back(std::move(comp));
  return e;
}

InvertibleResult check_invertible(const PLTuple& t,
                                  const CertifyOptions& opt) {
  InvertibleResult out;
  MinModulusResult mm = min_modulus_pl(t, opt);
  out.invertible = mm.value > 0.0;
  out.conclusive = true;
  out.cert = std::move(mm.cert);
  out.cert.target += " [exact path]";
  return out;
}

namespace {

bool identically_zero(const PLFunction& f) {
  for (const auto& v : f.values())
    if (v.real() != 0.0 || v.imag() != 0.0) return false;
  return true;
}

/// If no term carries a genuine product of two nonzero factors, the
/// expression is PL and collapses to a tuple (exact path possible).
std::optional<PLTuple> collapse_to_pl(const QuadExpr& expr) {
  const MeshPtr mesh = expr.mesh();
  std::vector<PLFunction> comps;
  for (const auto& comp : expr.components) {
    for (const auto& term : comp) {
      if (term.a && term.b && !identically_zero(*term.a) &&
          !identically_zero(*term.b))
        return std::nullopt;
    }
  }
  for (const auto& comp : expr.components) {
    std::vector<Complex> vals(mesh->vertex_count(), Complex{0.0, 0.0});
    for (const auto& term : comp) {
      if (term.a && term.b) continue;  // one factor identically zero
      if (term.a || term.b) {
        const PLFunction& f = term.a ? *term.a : *term.b;
        for (int v = 0; v < f.size(); ++v) vals[v] += term.coeff * f.value(v);
      } else {
        for (auto& v : vals) v += term.coeff;
      }
    }
    comps.emplace_back(mesh, Field::Complex, std::move(vals));
  }
  return PLTuple(std::move(comps));
}

}  // namespace

InvertibleResult check_invertible(const QuadExpr& expr,
                                  const CertifyOptions& opt) {
  if (auto pl = collapse_to_pl(expr)) {
    InvertibleResult out = check_invertible(*pl, opt);
    out.cert.target = expr.describe + " [exact path, degenerate products]";
    return out;
  }
  BernsteinOutcome bo = certify_min_modulus_expr(expr, 0.0, opt);
  InvertibleResult out;
  out.invertible = bo.ok;
  out.conclusive = bo.ok;  // budget exhaustion and corner zeros stay open
  out.cert = std::move(bo.cert);
  out.cert.target += " [bernstein path]";
  out.offending = std::move(bo.offending);
  return out;
}

Certificate certify_sup_norm(const PLFunction& f, std::string target) {
  Certificate c;
  c.kind = CertKind::SupNorm;
  c.value = sup_norm(f);
  c.target = target.empty() ? "sup-norm" : std::move(target);
  return c;
}

}  // namespace stablerank
