#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "stablerank/certify.hpp"

// Bernstein-form certification of piecewise-quadratic magnitude bounds.
//
// On a top simplex with barycentric coordinates l_0..l_d, each expression
// component E_c is a quadratic form  E_c(l) = l^T M_c l  with a complex
// symmetric matrix M_c whose entries are exactly the degree-2 Bernstein
// coefficients (diagonal = corner values).  The squared aggregate magnitude
// sum_c |E_c|^2 is a degree-4 polynomial whose Bernstein coefficients bound
// it from below; subdividing a simplex at edge midpoints is the congruence
// M -> W M W^T with exact dyadic weight rows W, so the pipeline stays
// numerically tame at any depth.

namespace stablerank {

namespace {

constexpr int kMaxV = 3;  // barycentric variable count (dimension + 1)

using Mat = std::array<Complex, kMaxV * kMaxV>;

int factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

struct PairTerm {
  int ia = 0, ib = 0;
  double w = 0.0;
};

/// Static combinatorial tables for a fixed variable count v (2 or 3).
struct Tables {
  int v = 2;
  std::vector<std::array<int, 3>> deg2, deg4;
  std::vector<std::pair<int, int>> deg2_pos;          // (k,l), k<=l per entry
  std::vector<std::vector<PairTerm>> expand;          // per deg4 index
  std::vector<int> corner4;                           // positions of 4*e_i

  explicit Tables(int vars) : v(vars) {
    for (int k = 0; k < v; ++k)
      for (int l = k; l < v; ++l) {
        std::array<int, 3> e{0, 0, 0};
        e[k]++;
        e[l]++;
        deg2.push_back(e);
        deg2_pos.emplace_back(k, l);
      }
    std::array<int, 3> g{0, 0, 0};
    enumerate(g, 0, 4);
    corner4.assign(v, -1);
    for (std::size_t p = 0; p < deg4.size(); ++p)
      for (int i = 0; i < v; ++i)
        if (deg4[p][i] == 4) corner4[i] = static_cast<int>(p);

    auto multinom = [](int deg, const std::array<int, 3>& e) {
      return double(factorial(deg)) /
             double(factorial(e[0]) * factorial(e[1]) * factorial(e[2]));
    };
    expand.resize(deg4.size());
    for (std::size_t ia = 0; ia < deg2.size(); ++ia)
      for (std::size_t ib = 0; ib < deg2.size(); ++ib) {
        std::array<int, 3> g4{};
        for (int i = 0; i < 3; ++i) g4[i] = deg2[ia][i] + deg2[ib][i];
        const int pos = position4(g4);
        const double w =
            multinom(2, deg2[ia]) * multinom(2, deg2[ib]) / multinom(4, g4);
        expand[pos].push_back(
            {static_cast<int>(ia), static_cast<int>(ib), w});
      }
  }

  int position4(const std::array<int, 3>& g) const {
    for (std::size_t p = 0; p < deg4.size(); ++p)
      if (deg4[p] == g) return static_cast<int>(p);
    throw std::logic_error("degree-4 index lookup failed");
  }

 private:
  void enumerate(std::array<int, 3>& g, int var, int left) {
    if (var == v - 1) {
      g[var] = left;
      deg4.push_back(g);
      g[var] = 0;
      return;
    }
    for (int e = left; e >= 0; --e) {
      g[var] = e;
      enumerate(g, var + 1, left - e);
    }
    g[var] = 0;
  }
};

const Tables& tables_for(int v) {
  static const Tables t2(2), t3(3);
  if (v == 2) return t2;
  if (v == 3) return t3;
  throw std::invalid_argument(
      "Bernstein certification supports mesh dimension <= 2");
}

/// Subdivision stencils: rows are child-corner barycentric weights in the
/// parent cell (exact dyadics).
struct Stencils {
  std::vector<std::array<std::array<double, 3>, 3>> children;
};

const Stencils& stencils_for(int v) {
  static const Stencils s2{{
      {{{1, 0, 0}, {0.5, 0.5, 0}, {0, 0, 0}}},
      {{{0.5, 0.5, 0}, {0, 1, 0}, {0, 0, 0}}},
  }};
  static const Stencils s3{{
      {{{1, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}}},
      {{{0.5, 0.5, 0}, {0, 1, 0}, {0, 0.5, 0.5}}},
      {{{0.5, 0, 0.5}, {0, 0.5, 0.5}, {0, 0, 1}}},
      {{{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}}},
  }};
  return v == 2 ? s2 : s3;
}

Mat congruence(const Mat& m, const std::array<std::array<double, 3>, 3>& w,
               int v) {
  Mat out{};
  for (int i = 0; i < v; ++i)
    for (int j = 0; j < v; ++j) {
      Complex acc = 0.0;
      for (int k = 0; k < v; ++k) {
        if (w[i][k] == 0.0) continue;
        Complex row = 0.0;
        for (int l = 0; l < v; ++l) {
          if (w[j][l] == 0.0) continue;
          row += w[j][l] * m[k * kMaxV + l];
        }
        acc += w[i][k] * row;
      }
      out[i * kMaxV + j] = acc;
    }
  return out;
}

struct Cell {
  int depth = 0;
  std::vector<Mat> m;  // one matrix per expression component
};

/// Minimum degree-4 Bernstein coefficient of sum_c |E_c|^2 and the minimum
/// corner (exact point) value.
struct CellBound {
  double low = 0.0;
  double corner_min = 0.0;
};

CellBound cell_bound(const Cell& cell, const Tables& t) {
  CellBound out;
  out.low = std::numeric_limits<double>::infinity();
  out.corner_min = std::numeric_limits<double>::infinity();
  const std::size_t n4 = t.deg4.size();
  for (std::size_t p = 0; p < n4; ++p) {
    double coeff = 0.0;
    for (const auto& m : cell.m) {
      for (const PairTerm& pt : t.expand[p]) {
        const auto [ka, la] = t.deg2_pos[pt.ia];
        const auto [kb, lb] = t.deg2_pos[pt.ib];
        const Complex a = m[ka * kMaxV + la];
        const Complex b = m[kb * kMaxV + lb];
        coeff += pt.w * (a.real() * b.real() + a.imag() * b.imag());
      }
    }
    out.low = std::min(out.low, coeff);
  }
  for (int i = 0; i < t.v; ++i) {
    double corner = 0.0;
    for (const auto& m : cell.m) {
      const Complex d = m[i * kMaxV + i];
      corner += d.real() * d.real() + d.imag() * d.imag();
    }
    out.corner_min = std::min(out.corner_min, corner);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Outward-rounded interval path.

double down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
double up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

struct IV {
  double lo = 0.0, hi = 0.0;
};

IV iv_exact(double x) { return {x, x}; }

IV iv_add(const IV& a, const IV& b) {
  return {down(a.lo + b.lo), up(a.hi + b.hi)};
}

IV iv_mul(const IV& a, const IV& b) {
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo,
               p4 = a.hi * b.hi;
  return {down(std::min(std::min(p1, p2), std::min(p3, p4))),
          up(std::max(std::max(p1, p2), std::max(p3, p4)))};
}

IV iv_sub(const IV& a, const IV& b) {
  return {down(a.lo - b.hi), up(a.hi - b.lo)};
}

IV iv_scale_nonneg(const IV& a, double s) {  // s >= 0, exact dyadic
  return {down(a.lo * s), up(a.hi * s)};
}

IV iv_scale(const IV& a, double s) {
  return s >= 0.0 ? IV{down(a.lo * s), up(a.hi * s)}
                  : IV{down(a.hi * s), up(a.lo * s)};
}

IV iv_prod_exact(double x, double y) {
  const double p = x * y;
  return {down(p), up(p)};
}

struct ICplx {
  IV re, im;
};

ICplx ic_add(const ICplx& a, const ICplx& b) {
  return {iv_add(a.re, b.re), iv_add(a.im, b.im)};
}

ICplx ic_scale_nonneg(const ICplx& a, double s) {
  return {iv_scale_nonneg(a.re, s), iv_scale_nonneg(a.im, s)};
}

/// Enclosure of the product of two exactly-known complex values.
ICplx ic_from_prod(const Complex& a, const Complex& b) {
  return {iv_sub(iv_prod_exact(a.real(), b.real()),
                 iv_prod_exact(a.imag(), b.imag())),
          iv_add(iv_prod_exact(a.real(), b.imag()),
                 iv_prod_exact(a.imag(), b.real()))};
}

/// Enclosure of interval-complex times exactly-known complex.
ICplx ic_mul_exact(const ICplx& a, const Complex& c) {
  return {iv_sub(iv_scale(a.re, c.real()), iv_scale(a.im, c.imag())),
          iv_add(iv_scale(a.re, c.imag()), iv_scale(a.im, c.real()))};
}

/// Enclosure of Re(a * conj(b)).
IV ic_re_conj_prod(const ICplx& a, const ICplx& b) {
  return iv_add(iv_mul(a.re, b.re), iv_mul(a.im, b.im));
}

using IMat = std::array<ICplx, kMaxV * kMaxV>;

IMat icongruence(const IMat& m, const std::array<std::array<double, 3>, 3>& w,
                 int v) {
  IMat out{};
  for (int i = 0; i < v; ++i)
    for (int j = 0; j < v; ++j) {
      ICplx acc{};
      for (int k = 0; k < v; ++k) {
        if (w[i][k] == 0.0) continue;
        ICplx row{};
        for (int l = 0; l < v; ++l) {
          if (w[j][l] == 0.0) continue;
          row = ic_add(row, ic_scale_nonneg(m[k * kMaxV + l], w[j][l]));
        }
        acc = ic_add(acc, ic_scale_nonneg(row, w[i][k]));
      }
      out[i * kMaxV + j] = acc;
    }
  return out;
}

struct ICell {
  int depth = 0;
  std::vector<IMat> m;
};

struct ICellBound {
  double low = 0.0;         // certified lower bound of min coefficient
  double corner_max = 0.0;  // certified upper bound of min corner value
};

ICellBound icell_bound(const ICell& cell, const Tables& t) {
  ICellBound out;
  out.low = std::numeric_limits<double>::infinity();
  out.corner_max = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < t.deg4.size(); ++p) {
    IV coeff{0.0, 0.0};
    for (const auto& m : cell.m) {
      for (const PairTerm& pt : t.expand[p]) {
        const auto [ka, la] = t.deg2_pos[pt.ia];
        const auto [kb, lb] = t.deg2_pos[pt.ib];
        const IV prod =
            ic_re_conj_prod(m[ka * kMaxV + la], m[kb * kMaxV + lb]);
        IV w{down(pt.w), up(pt.w)};
        coeff = iv_add(coeff, iv_mul(prod, w));
      }
    }
    out.low = std::min(out.low, coeff.lo);
  }
  for (int i = 0; i < t.v; ++i) {
    IV corner{0.0, 0.0};
    for (const auto& m : cell.m) {
      const ICplx d = m[i * kMaxV + i];
      corner = iv_add(corner, ic_re_conj_prod(d, d));
    }
    out.corner_max = std::min(out.corner_max, corner.hi);
  }
  return out;
}

}  // namespace

namespace {

BernsteinOutcome certify_min_modulus_impl(const QuadExpr& expr, double floor,
                                          const CertifyOptions& opt,
                                          const std::vector<int>* picks) {
  if (floor < 0.0)
    throw std::invalid_argument("certify_min_modulus_expr: negative floor");
  const MeshPtr mesh_ptr = expr.mesh();
  const SimplicialMesh& mesh = *mesh_ptr;
  const int v = mesh.dimension + 1;
  const Tables& t = tables_for(v);
  const Stencils& st = stencils_for(v);
  const int S = mesh.simplex_count();
  if (picks)
    for (int s : *picks)
      if (s < 0 || s >= S)
        throw std::invalid_argument(
            "certify_min_modulus_expr: simplex index out of range");
  const int roots = picks ? static_cast<int>(picks->size()) : S;
  const long long root_budget = std::max<long long>(
      256, static_cast<long long>(opt.max_cells) / std::max(1, roots));

  BernsteinOutcome out;
  out.cert.kind = CertKind::BernsteinLowerBound;
  out.cert.target =
      (expr.describe.empty() ? std::string("expression") : expr.describe);
  out.cert.facts.push_back("floor=" + std::to_string(floor));
  if (roots == 0) {
    out.ok = true;
    out.cert.value = floor;
    out.cert.facts.push_back("empty-region");
    return out;
  }
  double global = std::numeric_limits<double>::infinity();

  for (int idx = 0; idx < roots; ++idx) {
    const int s = picks ? (*picks)[idx] : idx;
    auto sx = mesh.simplex(s);
    // Degree-2 coefficient matrix per component at the root simplex.
    std::vector<Mat> root(expr.components.size());
    for (std::size_t c = 0; c < expr.components.size(); ++c) {
      Mat& m = root[c];
      m.fill(Complex{0.0, 0.0});
      for (const QuadTerm& term : expr.components[c]) {
        std::array<Complex, kMaxV> av{}, bv{};
        const bool has_a = term.a.has_value(), has_b = term.b.has_value();
        for (int i = 0; i < v; ++i) {
          av[i] = has_a ? term.a->value(sx[i]) : Complex{1.0, 0.0};
          bv[i] = has_b ? term.b->value(sx[i]) : Complex{1.0, 0.0};
        }
        if (has_a && has_b) {
          for (int k = 0; k < v; ++k)
            for (int l = 0; l < v; ++l)
              m[k * kMaxV + l] +=
                  term.coeff * (av[k] * bv[l] + av[l] * bv[k]) / 2.0;
        } else if (has_a || has_b) {
          const auto& cv = has_a ? av : bv;
          for (int k = 0; k < v; ++k)
            for (int l = 0; l < v; ++l)
              m[k * kMaxV + l] += term.coeff * (cv[k] + cv[l]) / 2.0;
        } else {
          for (int k = 0; k < v; ++k)
            for (int l = 0; l < v; ++l) m[k * kMaxV + l] += term.coeff;
        }
      }
    }

    long long used = 0;
    bool failed = false;
    double root_bound = std::numeric_limits<double>::infinity();

    if (!opt.outward_intervals) {
      std::vector<Cell> stack;
      stack.push_back({0, std::move(root)});
      while (!stack.empty()) {
        Cell cell = std::move(stack.back());
        stack.pop_back();
        ++used;
        const CellBound cb = cell_bound(cell, t);
        const double raw = std::sqrt(std::max(cb.low, 0.0));
        const double guarded = raw * (1.0 - opt.guard);
        const bool pass = floor > 0.0 ? guarded >= floor : guarded > 0.0;
        if (pass) {
          root_bound = std::min(root_bound, guarded);
          continue;
        }
        const double corner = std::sqrt(std::max(cb.corner_min, 0.0));
        const bool unreachable =
            floor > 0.0 ? corner < floor * (1.0 - 1e-12)
                        : cb.corner_min == 0.0;
        if (unreachable || cell.depth >= opt.max_depth ||
            used + static_cast<long long>(st.children.size()) > root_budget) {
          failed = true;
          break;
        }
        for (auto it = st.children.rbegin(); it != st.children.rend(); ++it) {
          Cell child;
          child.depth = cell.depth + 1;
          child.m.reserve(cell.m.size());
          for (const auto& m : cell.m)
            child.m.push_back(congruence(m, *it, v));
          stack.push_back(std::move(child));
        }
      }
    } else {
      // Rebuild the root matrices with outward rounding from the exact
      // vertex values, so the whole pipeline carries a rigorous enclosure.
      std::vector<IMat> iroot(expr.components.size());
      for (std::size_t c = 0; c < expr.components.size(); ++c) {
        IMat& m = iroot[c];
        for (auto& e : m) e = {iv_exact(0.0), iv_exact(0.0)};
        for (const QuadTerm& term : expr.components[c]) {
          std::array<Complex, kMaxV> av{}, bv{};
          const bool has_a = term.a.has_value(), has_b = term.b.has_value();
          for (int i = 0; i < v; ++i) {
            av[i] = has_a ? term.a->value(sx[i]) : Complex{1.0, 0.0};
            bv[i] = has_b ? term.b->value(sx[i]) : Complex{1.0, 0.0};
          }
          for (int k = 0; k < v; ++k)
            for (int l = 0; l < v; ++l) {
              ICplx entry;
              if (has_a && has_b) {
                entry = ic_scale_nonneg(
                    ic_add(ic_from_prod(av[k], bv[l]),
                           ic_from_prod(av[l], bv[k])),
                    0.5);
              } else if (has_a || has_b) {
                const auto& cv = has_a ? av : bv;
                const Complex sum = cv[k] + cv[l];
                entry = {iv_exact(sum.real() / 2.0),
                         iv_exact(sum.imag() / 2.0)};
                // the halved sum is one rounding away from exact; widen it
                entry.re = {down(entry.re.lo), up(entry.re.hi)};
                entry.im = {down(entry.im.lo), up(entry.im.hi)};
              } else {
                entry = {iv_exact(1.0), iv_exact(0.0)};
              }
              entry = ic_mul_exact(entry, term.coeff);
              m[k * kMaxV + l] = ic_add(m[k * kMaxV + l], entry);
            }
        }
      }
      std::vector<ICell> stack;
      stack.push_back({0, std::move(iroot)});
      while (!stack.empty()) {
        ICell cell = std::move(stack.back());
        stack.pop_back();
        ++used;
        const ICellBound cb = icell_bound(cell, t);
        const double raw = std::sqrt(std::max(cb.low, 0.0));
        const double guarded = raw * (1.0 - opt.guard);
        const bool pass = floor > 0.0 ? guarded >= floor : guarded > 0.0;
        if (pass) {
          root_bound = std::min(root_bound, guarded);
          continue;
        }
        const double corner = std::sqrt(std::max(cb.corner_max, 0.0));
        const bool unreachable =
            floor > 0.0 ? corner < floor * (1.0 - 1e-12)
                        : cb.corner_max == 0.0;
        if (unreachable || cell.depth >= opt.max_depth ||
            used + static_cast<long long>(st.children.size()) > root_budget) {
          failed = true;
          break;
        }
        for (auto it = st.children.rbegin(); it != st.children.rend(); ++it) {
          ICell child;
          child.depth = cell.depth + 1;
          child.m.reserve(cell.m.size());
          for (const auto& m : cell.m)
            child.m.push_back(icongruence(m, *it, v));
          stack.push_back(std::move(child));
        }
      }
    }

    out.cells_processed += used;
    if (failed) {
      out.offending.push_back(s);
    } else {
      global = std::min(global, root_bound);
      if (opt.keep_trace)
        out.cert.trace.push_back(
            {s, root_bound, 0.0, static_cast<int>(used)});
    }
  }

  out.ok = out.offending.empty();
  out.cert.value = out.ok ? global : 0.0;
  if (opt.outward_intervals)
    out.cert.facts.push_back("interval-mode");
  return out;
}

}  // namespace

BernsteinOutcome certify_min_modulus_expr(const QuadExpr& expr, double floor,
                                          const CertifyOptions& opt) {
  return certify_min_modulus_impl(expr, floor, opt, nullptr);
}

BernsteinOutcome certify_min_modulus_expr(const QuadExpr& expr, double floor,
                                          const CertifyOptions& opt,
                                          const std::vector<int>& simplices) {
  return certify_min_modulus_impl(expr, floor, opt, &simplices);
}

}  // namespace stablerank
