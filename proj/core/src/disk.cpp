#include "stablerank/disk.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace stablerank::disk {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmtc(Complex z) {
  return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")";
}

Poly trimmed(Poly p) {
  while (!p.coeff.empty() && p.coeff.back() == Complex{0.0, 0.0}) {
    p.coeff.pop_back();
  }
  return p;
}

/// Boundary samples h(e^{2*pi*i*k/N}) for k = 0..N-1.
std::vector<Complex> boundary_values(const Poly& p, int N) {
  std::vector<Complex> out(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    out[static_cast<std::size_t>(k)] =
        p.eval(std::polar(1.0, 2.0 * kPi * k / N));
  }
  return out;
}

bool is_constant(const Poly& p) { return p.degree() <= 0; }

Complex constant_value(const Poly& p) {
  return p.coeff.empty() ? Complex{0.0, 0.0} : p.coeff[0];
}

/// Lipschitz constant of the element on the closed disk, from the quotient
/// rule with coefficient-sum derivative and sup bounds.
double elem_lipschitz(const DiskElement& h) {
  const double s1n = deriv_abs_sum(h.num);
  if (is_constant(h.den)) {
    const double d = std::abs(constant_value(h.den));
    return s1n / d;
  }
  const double un = coeff_abs_sum(h.num);
  const double ud = coeff_abs_sum(h.den);
  const double s1d = deriv_abs_sum(h.den);
  return (s1n * ud + un * s1d) / (h.den_lower * h.den_lower);
}

/// Cheap certified upper bound of sup |h| on the disk from coefficient sums.
double elem_coeff_sup(const DiskElement& h) {
  return coeff_abs_sum(h.num) / h.den_lower;
}

/// Scalar boundary certification of a polynomial: a positive lower bound on
/// min |p| over the unit circle plus the winding number of p along it.
/// The winding is trusted only when 4*S1 <= lower*N, which forces every true
/// argument increment between consecutive samples below pi/2, so the
/// principal values sum to exactly 2*pi*winding.
struct ScalarCert {
  bool decisive = false;
  double lower = 0.0;       // certified min |p| on the boundary
  double sample_min = 0.0;  // smallest sampled |p|
  int winding = 0;
  int samples = 0;
  std::string reason;
};

ScalarCert certify_boundary(const Poly& p, const DiskOptions& opt) {
  ScalarCert out;
  const Poly q = trimmed(p);
  if (q.coeff.empty()) {
    out.reason = "the function is identically zero";
    return out;
  }
  const double s1 = deriv_abs_sum(q);
  for (int N = std::max(8, opt.boundary_start); N <= opt.boundary_max;
       N *= 2) {
    const std::vector<Complex> vals = boundary_values(q, N);
    double smin = std::numeric_limits<double>::infinity();
    for (const Complex& v : vals) smin = std::min(smin, std::abs(v));
    out.sample_min = smin;
    out.samples = N;
    const double lower = smin - s1 * kPi / N;
    if (lower <= 0.0) {
      out.reason = "boundary minimum did not separate from zero";
      continue;
    }
    if (4.0 * s1 > lower * N) {
      out.reason = "argument increments not yet certified below pi/2";
      continue;
    }
    double total = 0.0;
    bool steps_ok = true;
    for (int k = 0; k < N; ++k) {
      const Complex ratio = vals[static_cast<std::size_t>((k + 1) % N)] /
                            vals[static_cast<std::size_t>(k)];
      const double d = std::arg(ratio);
      if (std::abs(d) > kPi / 2 + 1e-12) {
        steps_ok = false;
        break;
      }
      total += d;
    }
    if (!steps_ok) {
      out.reason = "argument increments not yet certified below pi/2";
      continue;
    }
    out.decisive = true;
    out.lower = lower;
    out.winding = static_cast<int>(std::llround(total / (2.0 * kPi)));
    out.reason.clear();
    return out;
  }
  if (out.reason.empty()) out.reason = "boundary sample budget exhausted";
  return out;
}

Complex tuple_eval_norm_sq(const DiskTuple& t, Complex z) {
  double s = 0.0;
  for (const DiskElement& c : t.comps) {
    const double m = std::abs(de_eval(c, z));
    s += m * m;
  }
  return {s, 0.0};
}

double tuple_magnitude(const DiskTuple& t, Complex z) {
  return std::sqrt(tuple_eval_norm_sq(t, z).real());
}

/// Conservative sup of |e| over {z in closed disk : |g(z)| >= level} via a
/// cartesian cell cover.  Cell centers are clamped to the disk so every
/// Lipschitz excursion stays inside it (the disk is convex); a cell is kept
/// whenever the region could intersect it, so the returned value dominates
/// the true sup.  Returns 0 when no cell can meet the region.
double region_sup(const DiskElement& e, const DiskElement& g, double level,
                  int cells) {
  const double le = elem_lipschitz(e);
  const double lg = elem_lipschitz(g);
  const double step = 2.0 / cells;
  const double rcell = step * std::numbers::sqrt2 / 2.0;
  double best = 0.0;
  for (int iy = 0; iy < cells; ++iy) {
    for (int ix = 0; ix < cells; ++ix) {
      const Complex c{-1.0 + (ix + 0.5) * step, -1.0 + (iy + 0.5) * step};
      const double ca = std::abs(c);
      if (ca - rcell > 1.0) continue;  // cell misses the disk entirely
      const Complex cc = ca > 1.0 ? c / ca : c;
      const double reach = rcell + std::max(0.0, ca - 1.0);
      if (std::abs(de_eval(g, cc)) + lg * reach < level) continue;
      best = std::max(best, std::abs(de_eval(e, cc)) + le * reach);
    }
  }
  return best;
}

DiskElement make_element_unchecked(Poly num, Poly den, double den_lower) {
  DiskElement out;
  out.num = trimmed(std::move(num));
  out.den = trimmed(std::move(den));
  out.den_lower = den_lower;
  return out;
}

DiskTuple intermediate_tuple(const DiskTuple& f, const DiskElement& g,
                             const DiskTuple& y) {
  DiskTuple u;
  u.comps.reserve(f.comps.size());
  for (int j = 0; j < f.n(); ++j) {
    u.comps.push_back(de_add(f[j], de_mul(y[j], g)));
  }
  return u;
}

DiskTuple joint_tuple(const DiskTuple& f, const DiskElement& g) {
  DiskTuple t = f;
  t.comps.push_back(g);
  return t;
}

/// Moebius composition with a caller-supplied certified sup bound of the
/// inner element (avoids an expensive sampling pass when a coefficient
/// bound is already tight).
DiskElement mobius_with_bound(const DiskElement& inner, double a,
                              double inner_sup) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("mobius parameter a must lie in (0, 1)");
  }
  if (!(a * inner_sup < 1.0)) {
    throw std::domain_error(
        "mobius composition rejected: a * sup|inner| >= 1, the composed "
        "denominator could vanish");
  }
  const Poly& p = inner.num;
  const Poly& q = inner.den;
  Poly num = p_sub(p, p_scale(q, Complex{a, 0.0}));
  Poly den = p_sub(q, p_scale(p, Complex{a, 0.0}));
  // |q - a p| = |q| * |1 - a*(p/q)| >= den_lower * (1 - a * sup|inner|).
  const double lower = inner.den_lower * (1.0 - a * inner_sup);
  return make_element_unchecked(std::move(num), std::move(den), lower);
}

struct ChainBounds {
  double r_hat = 0.0;        // sup of the peak base on the off-region
  double contraction = 0.0;  // r_hat^m, certified sup of |Phi| off-region
  double R = 0.0;            // sup bound of |Phi| on the whole disk
  double P = 0.0;            // sup bound of |L_a(Phi)| on the whole disk
  double v_bar = 0.0;        // sup bound of every |v_j| on the whole disk
  double psi_bar = 0.0;      // sup bound of |psi| on the off-region
  double bound_sublevel = 0.0;
  double bound_off = 0.0;
};

/// Escalating cell cover for the off-region sup of the peak base, shared by
/// the reduction and the verifier so both land on the same bound.
double off_region_base_sup(const DiskElement& base, const DiskElement& g,
                           double level, const DiskOptions& opt) {
  double r_hat = 1.0;
  for (int cells = opt.region_cells; cells <= 4 * opt.region_cells;
       cells *= 2) {
    r_hat = region_sup(base, g, level, cells);
    if (r_hat < 1.0 - 1e-9) break;
  }
  return r_hat;
}

/// The arithmetic part of the floor certificate, shared by the reduction and
/// the verifier.  All inputs are certified quantities; everything here is
/// closed-form and deterministic.
ChainBounds chain_bounds(int n, double t_outer, double delta,
                         double delta_prime, double g_upper, double r_hat,
                         int m, const MobiusParams& mob, double R_base) {
  ChainBounds ch;
  ch.r_hat = r_hat;
  ch.contraction = std::pow(r_hat, m);
  ch.R = std::pow(R_base, m);
  const double a = mob.a;
  if (!(a * ch.R < 1.0)) {
    throw std::domain_error("peak sup bound too loose: a * R >= 1");
  }
  ch.P = std::max((ch.R + a) / (1.0 + a * ch.R),
                  (ch.R - a) / (1.0 - a * ch.R));
  ch.v_bar = 0.5 * (1.0 + ch.P * ch.P);
  const double one_minus_a = 1.0 - a;
  if (!(mob.eta > one_minus_a)) {
    throw std::domain_error("mobius margin eta - (1 - a) not positive");
  }
  ch.psi_bar = one_minus_a / (mob.eta - one_minus_a);
  const double root_n = std::sqrt(static_cast<double>(n));
  ch.bound_sublevel = delta - root_n * ch.v_bar * t_outer;
  ch.bound_off = delta_prime - root_n * g_upper * 4.0 * ch.psi_bar;
  return ch;
}

/// Rebuild the multiplier tuple from the stored deterministic parameters.
DiskTuple rebuild_multiplier(Complex zeta0, int m, const MobiusParams& mob,
                             const DiskTuple& y) {
  const DiskElement phi = peak_function(zeta0, m);
  const double R_base = coeff_abs_sum(
      Poly{{Complex{0.75, 0.0}, std::conj(zeta0) * 0.25}});
  const double R = std::pow(R_base, m);
  const DiskElement lphi = mobius_with_bound(phi, mob.a, R);
  const DiskElement psi = de_scale(de_shift(lphi, Complex{1.0, 0.0}), 0.5);
  const DiskElement one_minus_psi = de_sub(element(Poly::one()), psi);
  const DiskElement psi_sq = de_mul(psi, psi);
  const DiskElement omp_sq = de_mul(one_minus_psi, one_minus_psi);
  DiskTuple v;
  v.comps.reserve(y.comps.size());
  for (const DiskElement& yj : y.comps) {
    v.comps.push_back(de_add(psi_sq, de_mul(yj, omp_sq)));
  }
  return v;
}

bool poly_close(const Poly& a, const Poly& b, double tol) {
  const Poly ta = trimmed(a);
  const Poly tb = trimmed(b);
  if (ta.coeff.size() != tb.coeff.size()) return false;
  for (std::size_t i = 0; i < ta.coeff.size(); ++i) {
    if (std::abs(ta.coeff[i] - tb.coeff[i]) > tol) return false;
  }
  return true;
}

bool element_close(const DiskElement& a, const DiskElement& b, double tol) {
  return poly_close(a.num, b.num, tol) && poly_close(a.den, b.den, tol);
}

}  // namespace

Poly Poly::zero() { return {}; }
Poly Poly::one() { return {{Complex{1.0, 0.0}}}; }
Poly Poly::constant(Complex c) { return {{c}}; }
Poly Poly::z() { return {{Complex{0.0, 0.0}, Complex{1.0, 0.0}}}; }

bool Poly::is_zero() const {
  for (const Complex& c : coeff) {
    if (c != Complex{0.0, 0.0}) return false;
  }
  return true;
}

int Poly::degree() const {
  for (std::size_t i = coeff.size(); i-- > 0;) {
    if (coeff[i] != Complex{0.0, 0.0}) return static_cast<int>(i);
  }
  return -1;
}

Complex Poly::eval(Complex z) const {
  Complex acc{0.0, 0.0};
  for (std::size_t i = coeff.size(); i-- > 0;) {
    acc = acc * z + coeff[i];
  }
  return acc;
}

Poly p_add(const Poly& a, const Poly& b) {
  Poly out;
  out.coeff.resize(std::max(a.coeff.size(), b.coeff.size()),
                   Complex{0.0, 0.0});
  for (std::size_t i = 0; i < a.coeff.size(); ++i) out.coeff[i] += a.coeff[i];
  for (std::size_t i = 0; i < b.coeff.size(); ++i) out.coeff[i] += b.coeff[i];
  return trimmed(std::move(out));
}

Poly p_sub(const Poly& a, const Poly& b) {
  return p_add(a, p_scale(b, Complex{-1.0, 0.0}));
}

Poly p_mul(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly::zero();
  Poly out;
  out.coeff.resize(a.coeff.size() + b.coeff.size() - 1, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < a.coeff.size(); ++i) {
    if (a.coeff[i] == Complex{0.0, 0.0}) continue;
    for (std::size_t j = 0; j < b.coeff.size(); ++j) {
      out.coeff[i + j] += a.coeff[i] * b.coeff[j];
    }
  }
  return trimmed(std::move(out));
}

Poly p_scale(const Poly& a, Complex s) {
  Poly out = a;
  for (Complex& c : out.coeff) c *= s;
  return trimmed(std::move(out));
}

double coeff_abs_sum(const Poly& p) {
  double s = 0.0;
  for (const Complex& c : p.coeff) s += std::abs(c);
  return s;
}

double deriv_abs_sum(const Poly& p) {
  double s = 0.0;
  for (std::size_t k = 1; k < p.coeff.size(); ++k) {
    s += static_cast<double>(k) * std::abs(p.coeff[k]);
  }
  return s;
}

DiskElement element(Poly num) {
  return make_element_unchecked(std::move(num), Poly::one(), 1.0);
}

DiskElement element_trusted(Poly num, Poly den, double den_lower) {
  return make_element_unchecked(std::move(num), std::move(den), den_lower);
}

DiskElement element(Poly num, Poly den, const DiskOptions& opt) {
  const Poly d = trimmed(den);
  if (d.coeff.empty()) {
    throw std::invalid_argument("denominator is identically zero");
  }
  if (d.degree() == 0) {
    return make_element_unchecked(std::move(num), d, std::abs(d.coeff[0]));
  }
  const ScalarCert cert = certify_boundary(d, opt);
  if (!cert.decisive || cert.lower <= 0.0 || cert.winding != 0) {
    throw std::domain_error(
        "denominator certification failure: " +
        (cert.decisive ? "winding number " + std::to_string(cert.winding) +
                             " is nonzero, the denominator vanishes inside "
                             "the disk"
                       : cert.reason));
  }
  // No zeros inside (winding 0) and none on the boundary (lower > 0), so
  // the boundary lower bound extends to the whole closed disk by the
  // minimum-modulus principle.
  return make_element_unchecked(std::move(num), d,
                                cert.lower * (1.0 - opt.guard));
}

DiskElement de_add(const DiskElement& a, const DiskElement& b) {
  if (a.den.coeff == b.den.coeff) {
    return make_element_unchecked(p_add(a.num, b.num), a.den,
                                  std::min(a.den_lower, b.den_lower));
  }
  return make_element_unchecked(
      p_add(p_mul(a.num, b.den), p_mul(b.num, a.den)), p_mul(a.den, b.den),
      a.den_lower * b.den_lower);
}

DiskElement de_sub(const DiskElement& a, const DiskElement& b) {
  return de_add(a, de_scale(b, Complex{-1.0, 0.0}));
}

DiskElement de_mul(const DiskElement& a, const DiskElement& b) {
  return make_element_unchecked(p_mul(a.num, b.num), p_mul(a.den, b.den),
                                a.den_lower * b.den_lower);
}

DiskElement de_scale(const DiskElement& a, Complex s) {
  return make_element_unchecked(p_scale(a.num, s), a.den, a.den_lower);
}

DiskElement de_shift(const DiskElement& a, Complex s) {
  return make_element_unchecked(p_add(a.num, p_scale(a.den, s)), a.den,
                                a.den_lower);
}

DiskElement de_pow(const DiskElement& a, int m) {
  if (m < 0) throw std::invalid_argument("negative powers are not supported");
  DiskElement acc = element(Poly::one());
  DiskElement base = a;
  int e = m;
  while (e > 0) {
    if (e & 1) acc = de_mul(acc, base);
    e >>= 1;
    if (e > 0) base = de_mul(base, base);
  }
  return acc;
}

Complex de_eval(const DiskElement& a, Complex z) {
  return a.num.eval(z) / a.den.eval(z);
}

DiskElement mobius_compose(const DiskElement& inner, double a,
                           const DiskOptions& opt) {
  const double cheap = elem_coeff_sup(inner);
  if (a * cheap < 1.0) return mobius_with_bound(inner, a, cheap);
  return mobius_with_bound(inner, a, disk_sup_norm(inner, opt).upper);
}

BoundPair disk_sup_norm(const DiskElement& h, const DiskOptions& opt) {
  BoundPair best{0.0, std::numeric_limits<double>::infinity()};
  if (is_constant(h.den)) {
    const double d = std::abs(constant_value(h.den));
    const Poly p = trimmed(h.num);
    const int n = std::max(0, p.degree());
    if (n == 0) {
      const double v = p.coeff.empty() ? 0.0 : std::abs(p.coeff[0]) / d;
      return {v, v};
    }
    for (int N = std::max(8, opt.boundary_start); N <= opt.boundary_max;
         N *= 2) {
      double smax = 0.0;
      for (int k = 0; k < N; ++k) {
        smax = std::max(
            smax, std::abs(p.eval(std::polar(1.0, 2.0 * kPi * k / N))));
      }
      smax /= d;
      // Second-order gap: the nearest sample sits within h/2 = pi/N of the
      // maximizer in angle, and the real trigonometric polynomial
      // Re(e^{-i phi} p(e^{i t})) matching |p| at the maximizer has second
      // derivative bounded by n^2 * sup, so sup <= smax / (1 - n^2 h^2 / 8).
      const double hstep = 2.0 * kPi / N;
      const double corr = n * static_cast<double>(n) * hstep * hstep / 8.0;
      double upper;
      if (corr < 0.5) {
        upper = smax / (1.0 - corr);
      } else {
        upper = coeff_abs_sum(p) / d;
      }
      if (upper < best.upper) best = {smax, upper};
      if (best.upper - best.lower <= opt.sup_tol * std::max(1.0, best.lower)) {
        break;
      }
    }
    return best;
  }
  const double s1n = deriv_abs_sum(h.num);
  const double s1d = deriv_abs_sum(h.den);
  for (int N = std::max(8, opt.boundary_start); N <= opt.boundary_max;
       N *= 2) {
    const double arc = kPi / N;
    double lower = 0.0;
    double upper = 0.0;
    bool usable = true;
    for (int k = 0; k < N; ++k) {
      const Complex z = std::polar(1.0, 2.0 * kPi * k / N);
      const double nv = std::abs(h.num.eval(z));
      const double dv = std::abs(h.den.eval(z));
      lower = std::max(lower, nv / dv);
      const double dlow = dv - s1d * arc;
      if (dlow <= 0.0) {
        usable = false;
        break;
      }
      upper = std::max(upper, (nv + s1n * arc) / dlow);
    }
    if (usable && upper < best.upper) best = {lower, upper};
    if (best.upper - best.lower <= opt.sup_tol * std::max(1.0, best.lower)) {
      break;
    }
  }
  if (!std::isfinite(best.upper)) best.upper = elem_coeff_sup(h);
  return best;
}

DiskInvertibleResult disk_check_invertible(const DiskElement& h,
                                           const DiskOptions& opt) {
  DiskInvertibleResult out;
  out.cert.kind = CertKind::Composite;
  out.cert.target = "scalar disk invertibility (boundary bound + winding)";
  const Poly num = trimmed(h.num);
  if (num.coeff.empty()) {
    out.conclusive = true;
    out.invertible = false;
    out.cert.facts.push_back("the function is identically zero");
    return out;
  }
  // The denominator is certified nonvanishing, so invertibility is decided
  // by the numerator alone; its winding along the boundary counts the
  // interior zeros by the argument principle.
  const ScalarCert cert = certify_boundary(num, opt);
  if (!cert.decisive) {
    out.cert.facts.push_back("inconclusive: " + cert.reason);
    out.cert.facts.push_back("boundary samples used: " +
                             std::to_string(cert.samples));
    return out;
  }
  out.conclusive = true;
  out.invertible = cert.winding == 0;
  // |num/den| >= lower(|num|) / sup(|den|) on the boundary, and by the
  // minimum-modulus principle on the whole disk when the winding is zero.
  out.cert.value = cert.lower / coeff_abs_sum(h.den);
  out.cert.facts.push_back("boundary |num| >= " + fmt(cert.lower) + " at N = " +
                           std::to_string(cert.samples));
  out.cert.facts.push_back("winding number along the boundary: " +
                           std::to_string(cert.winding));
  if (!out.invertible) {
    out.cert.facts.push_back(
        "nonzero winding: the function has interior zeros");
  }
  return out;
}

DiskMinBound disk_min_magnitude(const DiskTuple& t, const DiskOptions& opt) {
  DiskMinBound out;
  out.cert.kind = CertKind::Composite;
  out.cert.target = "tuple magnitude lower bound over the closed disk";
  if (t.n() == 0) {
    out.cert.facts.push_back("empty tuple");
    return out;
  }
  double lag_sq = 0.0;
  for (const DiskElement& c : t.comps) {
    const double l = elem_lipschitz(c);
    lag_sq += l * l;
  }
  const double lag = std::sqrt(lag_sq);
  double best_lower = -std::numeric_limits<double>::infinity();
  for (int nr = std::max(4, opt.grid_start); nr <= opt.grid_max; nr *= 2) {
    const int ntheta = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * nr)));
    double grid_min = std::numeric_limits<double>::infinity();
    Complex argmin{0.0, 0.0};
    for (int i = 0; i <= nr; ++i) {
      const double r = static_cast<double>(i) / nr;
      const int count = i == 0 ? 1 : ntheta;
      for (int k = 0; k < count; ++k) {
        const Complex z = std::polar(r, 2.0 * kPi * k / ntheta);
        const double m = tuple_magnitude(t, z);
        if (m < grid_min) {
          grid_min = m;
          argmin = z;
        }
      }
    }
    if (grid_min == 0.0) {
      out.cert.facts.push_back("exact zero sampled at z = " + fmtc(argmin));
      return out;
    }
    const double rho = std::hypot(0.5 / nr, kPi / ntheta);
    const double lower = grid_min - lag * rho;
    best_lower = std::max(best_lower, lower);
    if (lower > 0.0) {
      out.ok = true;
      out.value = lower * (1.0 - opt.guard);
      out.cert.value = out.value;
      out.cert.facts.push_back("polar grid: " + std::to_string(nr) +
                               " rings x " + std::to_string(ntheta) +
                               " angles, covering radius " + fmt(rho));
      out.cert.facts.push_back("smallest sampled magnitude " + fmt(grid_min) +
                               " at z = " + fmtc(argmin));
      out.cert.facts.push_back("joint Lipschitz bound " + fmt(lag));
      return out;
    }
  }
  out.cert.facts.push_back(
      "inconclusive: grid bound stayed at " + fmt(best_lower) +
      " after the radial budget " + std::to_string(opt.grid_max));
  return out;
}

DiskInvertibleResult disk_check_invertible(const DiskTuple& t,
                                           const DiskOptions& opt) {
  if (t.n() == 1) return disk_check_invertible(t[0], opt);
  DiskInvertibleResult out;
  const DiskMinBound mb = disk_min_magnitude(t, opt);
  out.cert = mb.cert;
  if (mb.ok) {
    out.invertible = true;
    out.conclusive = true;
    return out;
  }
  for (const std::string& f : mb.cert.facts) {
    if (f.rfind("exact zero sampled", 0) == 0) {
      out.invertible = false;
      out.conclusive = true;
      return out;
    }
  }
  return out;
}

WindingResult disk_winding(const Poly& p, const DiskOptions& opt) {
  const ScalarCert cert = certify_boundary(p, opt);
  WindingResult out;
  out.decisive = cert.decisive;
  out.winding = cert.winding;
  out.boundary_lower = cert.lower;
  out.samples = cert.samples;
  out.reason = cert.reason;
  return out;
}

DiskElement peak_function(Complex zeta0, int m) {
  if (m < 2) throw std::invalid_argument("peak power must be at least 2");
  const double mag = std::abs(zeta0);
  if (!(mag > 0.0)) {
    throw std::invalid_argument("peak point must be a nonzero direction");
  }
  const Complex unit = zeta0 / mag;
  // With q(z) = (1 + z*conj(zeta0))/2 the base (1 + q)/2 equals
  // (3 + z*conj(zeta0))/4: value 1 at zeta0, modulus < 1 elsewhere.
  const Poly base{{Complex{0.75, 0.0}, std::conj(unit) * 0.25}};
  Poly acc = Poly::one();
  Poly sq = base;
  int e = m;
  while (e > 0) {
    if (e & 1) acc = p_mul(acc, sq);
    e >>= 1;
    if (e > 0) sq = p_mul(sq, sq);
  }
  return element(std::move(acc));
}

MobiusParams mobius_param(double eta, double epsilon) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1)");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  MobiusParams out;
  out.eta = eta;
  out.epsilon = epsilon;
  out.a = 1.0 - epsilon * eta / 8.0;
  return out;
}

DiskOutcome disk_norm_one_reduce(const DiskTuple& f, const DiskElement& g,
                                 const DiskTuple& y,
                                 const DiskParams& params) {
  const DiskOptions& opt = params.options;
  DiskOutcome out;
  const int n = f.n();
  if (n < 1) throw std::invalid_argument("the tuple must not be empty");
  if (y.n() != n) {
    throw std::invalid_argument(
        "the small-norm witness must match the tuple length");
  }
  std::vector<Certificate> certs;

  // The witness must keep every component strictly below 1/2 in sup norm;
  // the blend bound on |v_j| depends on it.
  for (int j = 0; j < n; ++j) {
    const BoundPair sup = disk_sup_norm(y[j], opt);
    if (!(sup.upper < 0.5)) {
      throw std::invalid_argument(
          "small-norm witness component " + std::to_string(j) +
          " did not certify below 1/2 (upper bound " + fmt(sup.upper) + ")");
    }
  }

  // Boundary argmin of |g| (ties resolved toward the smallest angle); the
  // reduction only applies when g genuinely reaches (numerically) zero on
  // the boundary.
  const int scan_n = std::max(opt.boundary_start, 8192);
  double gmin = std::numeric_limits<double>::infinity();
  int kmin = 0;
  for (int k = 0; k < scan_n; ++k) {
    const double m =
        std::abs(de_eval(g, std::polar(1.0, 2.0 * kPi * k / scan_n)));
    if (m < gmin) {
      gmin = m;
      kmin = k;
    }
  }
  if (gmin > opt.zero_tol) {
    throw std::domain_error(
        "hypothesis failure: the boundary minimum of |g| is " + fmt(gmin) +
        ", not numerically zero; the norm-one reduction needs a boundary "
        "zero of g");
  }
  const Complex zeta0 =
      kmin == 0 ? Complex{1.0, 0.0} : std::polar(1.0, 2.0 * kPi * kmin / scan_n);

  // Certified joint minimum of (f, g) and the derived sublevel radius.
  const DiskMinBound joint = disk_min_magnitude(joint_tuple(f, g), opt);
  if (!joint.ok) {
    out.failure.reason =
        "the joint magnitude of (f, g) did not certify positive";
    out.failure.offending = {};
    return out;
  }
  certs.push_back(joint.cert);
  const double c = joint.value;
  const double root_n = std::sqrt(static_cast<double>(n));
  const double t_outer =
      std::min(c / 2.0, c * std::numbers::sqrt3 / (4.0 * root_n));
  const double delta = std::sqrt(c * c - t_outer * t_outer);

  // Certified minimum of the intermediate tuple u = f + y*g.
  const DiskTuple u = intermediate_tuple(f, g, y);
  const DiskMinBound inter = disk_min_magnitude(u, opt);
  if (!inter.ok) {
    out.failure.reason =
        "the intermediate tuple f + y*g did not certify invertible";
    return out;
  }
  certs.push_back(inter.cert);
  const double delta_prime = inter.value;

  const double g_upper = disk_sup_norm(g, opt).upper;
  double eps = g_upper > 0.0 ? delta_prime / (4.0 * root_n * g_upper) : 0.5;
  eps = std::min(eps, 0.5);
  const MobiusParams mob = mobius_param(0.5, eps);

  // Contraction of the peak base on the off-region {|g| >= t_outer}: the
  // peak power m only has to beat r_hat, its degree-1 sup there.
  const Poly base_poly{{Complex{0.75, 0.0}, std::conj(zeta0) * 0.25}};
  const double r_hat = off_region_base_sup(element(base_poly), g, t_outer, opt);
  if (!(r_hat < 1.0 - 1e-9)) {
    out.failure.reason =
        "the peak base did not certify a contraction on the off-region "
        "(sup bound " + fmt(r_hat) + ")";
    return out;
  }

  int m = 2;
  if (r_hat > 0.0) {
    while (m <= opt.max_peak_power && std::pow(r_hat, m) > 0.5) m *= 2;
    if (m > opt.max_peak_power) {
      out.failure.reason = "peak power budget exhausted before |Phi| <= 1/2 "
                           "held on the off-region";
      return out;
    }
    int lo = std::max(2, m / 2);
    int hi = m;
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      if (std::pow(r_hat, mid) <= 0.5) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    m = hi;
  }

  const double R_base = coeff_abs_sum(base_poly);
  const ChainBounds ch = chain_bounds(n, t_outer, delta, delta_prime, g_upper,
                                      r_hat, m, mob, R_base);
  if (!(ch.contraction <= 0.5)) {
    out.failure.reason = "off-region contraction did not reach 1/2";
    return out;
  }
  const double floor =
      std::min(ch.bound_sublevel, ch.bound_off) * (1.0 - opt.guard);
  if (!(floor > 0.0)) {
    out.failure.reason =
        "the certified floor of the reduced tuple is not positive "
        "(sublevel bound " + fmt(ch.bound_sublevel) + ", off-region bound " +
        fmt(ch.bound_off) + ")";
    return out;
  }

  const DiskTuple v = rebuild_multiplier(zeta0, m, mob, y);
  DiskTuple reduced;
  reduced.comps.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    reduced.comps.push_back(de_add(f[j], de_mul(v[j], g)));
  }

  // Peak normalization: every multiplier component equals 1 at zeta0.
  std::vector<BoundPair> sup_bounds(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double at_peak = std::abs(de_eval(v[j], zeta0));
    if (std::abs(at_peak - 1.0) > 1e-9) {
      out.failure.reason = "peak normalization drifted: |v_" +
                           std::to_string(j) + "(zeta0)| = " + fmt(at_peak);
      return out;
    }
    sup_bounds[static_cast<std::size_t>(j)] = {at_peak, ch.v_bar};
  }
  if (!(ch.v_bar <= 1.0 + 1e-6)) {
    out.failure.reason =
        "the multiplier sup bound " + fmt(ch.v_bar) + " exceeded 1 + 1e-6";
    return out;
  }

  // Pointwise blend bound |v_j| <= (|1+p|^2 + |1-p|^2)/4 with p = L_a(Phi),
  // asserted on a boundary sample sweep.
  const DiskElement phi = peak_function(zeta0, m);
  const DiskElement lphi = mobius_with_bound(phi, mob.a, ch.R);
  const int sweep = 10000;
  for (int k = 0; k < sweep; ++k) {
    const Complex z = std::polar(1.0, 2.0 * kPi * k / sweep);
    const Complex p = de_eval(lphi, z);
    const double rhs = (std::norm(Complex{1.0, 0.0} + p) +
                        std::norm(Complex{1.0, 0.0} - p)) /
                       4.0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(de_eval(v[j], z)) > rhs + 1e-9) {
        out.failure.reason =
            "the blend bound failed at a boundary sample (angle index " +
            std::to_string(k) + ", component " + std::to_string(j) + ")";
        return out;
      }
    }
  }

  Certificate floor_cert;
  floor_cert.kind = CertKind::Composite;
  floor_cert.value = floor;
  floor_cert.target = "lower bound of |f + v*g| over the closed disk";
  floor_cert.facts = {
      "joint minimum c = " + fmt(c),
      "sublevel radius t = " + fmt(t_outer) +
          ", |f| >= delta = " + fmt(delta) + " there",
      "intermediate minimum delta' = " + fmt(delta_prime),
      "sup|g| <= " + fmt(g_upper),
      "mobius parameters: eta = " + fmt(mob.eta) + ", eps = " + fmt(eps) +
          ", a = " + fmt(mob.a),
      "peak base off-region sup r = " + fmt(r_hat) + ", power m = " +
          std::to_string(m) + ", contraction r^m = " + fmt(ch.contraction) +
          " <= 1/2",
      "global peak bound R = " + fmt(ch.R) + ", mobius image bound P = " +
          fmt(ch.P),
      "multiplier sup bound (1 + P^2)/2 = " + fmt(ch.v_bar),
      "off-region |psi| <= " + fmt(ch.psi_bar) +
          ", deviation |v_j - y_j| <= 4|psi|",
      "sublevel floor " + fmt(ch.bound_sublevel) + ", off-region floor " +
          fmt(ch.bound_off),
  };
  floor_cert.parts = {joint.cert, inter.cert};
  certs.push_back(floor_cert);

  out.ok = true;
  out.witness.multiplier = v;
  out.witness.reduced = std::move(reduced);
  out.witness.y = y;
  out.witness.zeta0 = zeta0;
  out.witness.m = m;
  out.witness.mobius = mob;
  out.witness.c = c;
  out.witness.t_outer = t_outer;
  out.witness.delta = delta;
  out.witness.delta_prime = delta_prime;
  out.witness.g_upper = g_upper;
  out.witness.floor = floor;
  out.witness.sup_bounds = std::move(sup_bounds);
  out.witness.certificates = std::move(certs);
  return out;
}

DiskSearchOutcome disk_small_norm_witness(const DiskTuple& f,
                                          const DiskElement& g, double bound,
                                          const DiskParams& params) {
  DiskSearchOutcome out;
  if (!(bound > 0.0 && bound <= 0.5)) {
    throw std::invalid_argument("the witness bound must lie in (0, 1/2]");
  }
  const int n = f.n();
  if (n < 1) throw std::invalid_argument("the tuple must not be empty");

  // f alone already invertible: the zero witness works.
  const DiskInvertibleResult plain = disk_check_invertible(f, params.options);
  if (plain.conclusive && plain.invertible) {
    out.ok = true;
    out.y.comps.assign(static_cast<std::size_t>(n), element(Poly::zero()));
    out.cert = plain.cert;
    return out;
  }

  Rng rng(params.seed);
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    DiskTuple y;
    y.comps.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const int deg = rng.uniform_int(0, 2);
      Poly p;
      p.coeff.resize(static_cast<std::size_t>(deg) + 1);
      double sum = 0.0;
      for (Complex& cc : p.coeff) {
        cc = rng.unit_disk();
        sum += std::abs(cc);
      }
      // Scale so the coefficient sum (a certified sup bound) lands strictly
      // under the requested bound.
      const double target = bound * rng.uniform(0.25, 0.95);
      const double s = sum > 0.0 ? target / sum : 0.0;
      for (Complex& cc : p.coeff) cc *= s;
      y.comps.push_back(element(std::move(p)));
    }
    const DiskMinBound mb =
        disk_min_magnitude(intermediate_tuple(f, g, y), params.options);
    if (mb.ok) {
      out.ok = true;
      out.y = std::move(y);
      out.cert = mb.cert;
      out.failure.retries_used = attempt + 1;
      return out;
    }
  }
  out.failure.reason =
      "no small-norm witness certified within " +
      std::to_string(params.max_attempts) +
      " attempts (such a witness need not exist)";
  out.failure.retries_used = params.max_attempts;
  return out;
}

VerifyReport disk_verify_witness(const DiskTuple& f, const DiskElement& g,
                                 const DiskWitness& w, const DiskOptions& opt) {
  VerifyReport rep;
  auto fail = [&rep](std::string msg) {
    rep.ok = false;
    rep.failures.push_back(std::move(msg));
  };
  const int n = f.n();
  if (w.y.n() != n || w.multiplier.n() != n || w.reduced.n() != n) {
    fail("witness tuple lengths do not match the problem");
    return rep;
  }
  if (std::abs(std::abs(w.zeta0) - 1.0) > 1e-12) {
    fail("the stored peak point is not on the boundary circle");
    return rep;
  }
  if (w.m < 2) {
    fail("the stored peak power is below 2");
    return rep;
  }
  const MobiusParams mob = mobius_param(w.mobius.eta, w.mobius.epsilon);
  if (std::abs(mob.a - w.mobius.a) > 1e-15) {
    fail("the stored mobius parameter does not match its formula");
  }

  // Deterministic rebuild of the multiplier and the reduced tuple.
  DiskTuple v;
  try {
    v = rebuild_multiplier(w.zeta0, w.m, mob, w.y);
  } catch (const std::exception& e) {
    fail(std::string("multiplier rebuild failed: ") + e.what());
    return rep;
  }
  for (int j = 0; j < n; ++j) {
    if (!element_close(v[j], w.multiplier[j], 1e-12)) {
      fail("multiplier component " + std::to_string(j) +
           " does not match its deterministic rebuild");
    }
    const DiskElement red = de_add(f[j], de_mul(v[j], g));
    if (!element_close(red, w.reduced[j], 1e-12)) {
      fail("reduced component " + std::to_string(j) +
           " does not equal f_j + v_j * g");
    }
  }

  // Re-certify the measured inputs of the floor chain.
  const DiskMinBound joint = disk_min_magnitude(joint_tuple(f, g), opt);
  if (!joint.ok || std::abs(joint.value - w.c) > 1e-9 * std::max(1.0, w.c)) {
    fail("the joint minimum of (f, g) did not re-certify to the stored value");
  }
  const DiskMinBound inter =
      disk_min_magnitude(intermediate_tuple(f, g, w.y), opt);
  if (!inter.ok ||
      std::abs(inter.value - w.delta_prime) >
          1e-9 * std::max(1.0, w.delta_prime)) {
    fail("the intermediate minimum did not re-certify to the stored value");
  }
  const double g_upper = disk_sup_norm(g, opt).upper;
  if (std::abs(g_upper - w.g_upper) > 1e-9 * std::max(1.0, w.g_upper)) {
    fail("the sup bound of |g| did not re-certify to the stored value");
  }

  // Re-run the closed-form chain from the stored measured inputs.
  const Poly base_poly{
      {Complex{0.75, 0.0}, std::conj(w.zeta0 / std::abs(w.zeta0)) * 0.25}};
  const double r_hat =
      off_region_base_sup(element(base_poly), g, w.t_outer, opt);
  try {
    const ChainBounds ch =
        chain_bounds(n, w.t_outer, w.delta, w.delta_prime, w.g_upper, r_hat,
                     w.m, mob, coeff_abs_sum(base_poly));
    if (!(ch.contraction <= 0.5)) {
      fail("the off-region contraction r^m <= 1/2 did not re-certify");
    }
    const double floor =
        std::min(ch.bound_sublevel, ch.bound_off) * (1.0 - opt.guard);
    if (!(floor > 0.0)) {
      fail("the recomputed floor is not positive");
    } else if (std::abs(floor - w.floor) > 1e-9 * std::max(1.0, w.floor)) {
      fail("the recomputed floor " + fmt(floor) +
           " does not match the stored floor " + fmt(w.floor));
    }
    if (!(ch.v_bar <= 1.0 + 1e-6)) {
      fail("the multiplier sup bound exceeded 1 + 1e-6 on re-verification");
    }
  } catch (const std::exception& e) {
    fail(std::string("floor chain recomputation failed: ") + e.what());
  }

  // Peak normalization and the stored sup enclosures.
  if (w.sup_bounds.size() != static_cast<std::size_t>(n)) {
    fail("witness sup-bound list has the wrong length");
  } else {
    for (int j = 0; j < n; ++j) {
      const double at_peak = std::abs(de_eval(v[j], w.zeta0));
      if (std::abs(at_peak - 1.0) > 1e-9) {
        fail("multiplier component " + std::to_string(j) +
             " is not 1 at the peak point");
      }
      const BoundPair& b = w.sup_bounds[static_cast<std::size_t>(j)];
      if (!(b.lower >= 1.0 - 1e-6 && b.upper <= 1.0 + 1e-6)) {
        fail("stored sup enclosure of component " + std::to_string(j) +
             " is outside [1 - 1e-6, 1 + 1e-6]");
      }
    }
  }
  return rep;
}

}  // namespace stablerank::disk
