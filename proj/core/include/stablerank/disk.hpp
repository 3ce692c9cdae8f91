#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stablerank/reduce.hpp"

namespace stablerank::disk {

/// Polynomial in z with complex coefficients, ascending powers.  An empty
/// coefficient list is the zero polynomial.
struct Poly {
  std::vector<Complex> coeff;

  static Poly zero();
  static Poly one();
  static Poly constant(Complex c);
  static Poly z();

  bool is_zero() const;
  int degree() const;  // -1 for the zero polynomial
  Complex eval(Complex z) const;
};

Poly p_add(const Poly& a, const Poly& b);
Poly p_sub(const Poly& a, const Poly& b);
Poly p_mul(const Poly& a, const Poly& b);
Poly p_scale(const Poly& a, Complex s);
/// Sum of |c_k| — an upper bound for |p| on the closed disk.
double coeff_abs_sum(const Poly& p);
/// Sum of k*|c_k| — an upper bound for |p'| on the closed disk, hence a
/// Lipschitz constant for p there (and for p on the boundary circle in
/// arc length).
double deriv_abs_sum(const Poly& p);

/// Tuning knobs for the certification routines.
struct DiskOptions {
  int boundary_start = 1 << 10;  // boundary samples (doubled on demand)
  int boundary_max = 1 << 21;
  int grid_start = 48;           // radial rings of the disk grid
  int grid_max = 1536;
  int region_cells = 256;        // cartesian cells per axis for region sups
  int max_peak_power = 4096;
  double guard = 1e-8;           // relative shrink of certified lower bounds
  double zero_tol = 1e-8;        // boundary-zero hypothesis threshold
  double sup_tol = 1e-7;         // target enclosure width for sup norms
};

/// Rational function num/den on the closed unit disk whose denominator
/// carries a certified positive lower bound there, making the element a
/// well-defined member of the algebra of disk-continuous holomorphic
/// functions and the representation closed under +, *, and composition
/// with the Moebius maps used by the reductions.
struct DiskElement {
  Poly num;
  Poly den = Poly::one();
  double den_lower = 1.0;  // certified min of |den| over the closed disk
};

/// Wrap a polynomial (denominator 1).
DiskElement element(Poly num);
/// Wrap a quotient; certifies the denominator (boundary minimum plus zero
/// winding) and throws std::domain_error when certification fails.
DiskElement element(Poly num, Poly den, const DiskOptions& opt = {});
/// Wrap a quotient with a caller-supplied denominator bound, skipping the
/// certification pass.  Only for reloading derived data (multipliers,
/// reduced tuples) whose certification is reproduced from scratch by the
/// witness verifier; never feed it untrusted primary inputs.
DiskElement element_trusted(Poly num, Poly den, double den_lower);

DiskElement de_add(const DiskElement& a, const DiskElement& b);
DiskElement de_sub(const DiskElement& a, const DiskElement& b);
DiskElement de_mul(const DiskElement& a, const DiskElement& b);
DiskElement de_scale(const DiskElement& a, Complex s);
DiskElement de_shift(const DiskElement& a, Complex s);
DiskElement de_pow(const DiskElement& a, int m);
Complex de_eval(const DiskElement& a, Complex z);

/// Compose the Moebius map L_a(w) = (w - a)/(1 - a w), a in (0,1), with an
/// inner element: (inner - a)/(1 - a*inner).  Requires a certified sup
/// bound R of |inner| with a*R < 1, which makes the new denominator lower
/// bound den_lower*(1 - a*R) rigorous without further analysis.
DiskElement mobius_compose(const DiskElement& inner, double a,
                           const DiskOptions& opt = {});

struct DiskTuple {
  std::vector<DiskElement> comps;
  int n() const { return static_cast<int>(comps.size()); }
  const DiskElement& operator[](int i) const { return comps[i]; }
  DiskElement& operator[](int i) { return comps[i]; }
};

/// Certified sup-norm enclosure.
struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
};

/// Enclose sup |h| over the closed disk (equivalently over the boundary
/// circle, by the maximum principle).  Polynomials use boundary samples
/// sharpened by the second-order trigonometric derivative inequality;
/// quotients use sample values widened by coefficient-sum Lipschitz bounds.
BoundPair disk_sup_norm(const DiskElement& h, const DiskOptions& opt = {});

struct DiskInvertibleResult {
  bool invertible = false;
  bool conclusive = false;
  Certificate cert;
};

/// Scalar case: certified boundary minimum plus winding number (argument
/// principle); conclusive in both directions when the boundary bound
/// clears.  Tuple case: certified minimum of the joint magnitude over a
/// polar grid with Lipschitz widening; conclusive only when positive.
DiskInvertibleResult disk_check_invertible(const DiskElement& h,
                                           const DiskOptions& opt = {});
DiskInvertibleResult disk_check_invertible(const DiskTuple& t,
                                           const DiskOptions& opt = {});

/// Certified winding number of a polynomial along the unit circle (equals
/// its number of zeros inside, by the argument principle).  Decisive only
/// when the boundary modulus separates from zero and the sample count
/// provably keeps every argument increment below pi/2.
struct WindingResult {
  bool decisive = false;
  int winding = 0;
  double boundary_lower = 0.0;  // certified min |p| on the circle
  int samples = 0;
  std::string reason;  // set when not decisive
};
WindingResult disk_winding(const Poly& p, const DiskOptions& opt = {});

/// Certified lower bound of the joint magnitude of a tuple over the closed
/// disk (the workhorse behind the tuple invertibility check); value 0 with
/// ok=false when inconclusive at the budget.
struct DiskMinBound {
  bool ok = false;
  double value = 0.0;
  Certificate cert;
};
DiskMinBound disk_min_magnitude(const DiskTuple& t,
                                const DiskOptions& opt = {});

/// Peak polynomial at a boundary point: with q(z) = (1 + z*conj(zeta0))/2,
/// returns ((1+q)/2)^m.  Its value at zeta0 is 1 and its modulus is < 1
/// everywhere else on the closed disk.  Requires m >= 2.
DiskElement peak_function(Complex zeta0, int m);

/// Parameters of the Moebius map family: for 0 < eta < 1 and 0 < eps < 1,
/// a = 1 - eps*eta/8 guarantees that L_a maps the part of the closed disk
/// at distance >= eta from 1 into the eps-neighborhood of -1.
struct MobiusParams {
  double eta = 0.5;
  double epsilon = 0.5;
  double a = 0.0;
};
MobiusParams mobius_param(double eta, double epsilon);

struct DiskParams {
  double epsilon = 0.5;  // norm bound for the witness search
  int max_attempts = 64;
  std::uint64_t seed = 0;
  DiskOptions options;
};

/// Norm-one reduction witness over the disk algebra.  All fields needed to
/// rebuild the multiplier deterministically (no random state) are stored.
struct DiskWitness {
  DiskTuple multiplier;  // v, each component sup-norm 1 within sup_tol
  DiskTuple reduced;     // f + v*g
  DiskTuple y;           // the small-norm witness that was blended in
  Complex zeta0{1.0, 0.0};
  int m = 2;
  MobiusParams mobius;
  double c = 0.0;            // certified joint minimum of (f, g)
  double t_outer = 0.0;      // sublevel radius of |g| used for the split
  double delta = 0.0;        // lower bound of |f| on the sublevel
  double delta_prime = 0.0;  // certified minimum of |f + y*g|
  double g_upper = 0.0;      // certified sup bound of |g|
  double floor = 0.0;        // certified lower bound of |f + v*g|
  std::vector<BoundPair> sup_bounds;  // per-component sup enclosure of v_j
  std::vector<Certificate> certificates;
};

struct DiskOutcome {
  bool ok = false;
  DiskWitness witness;
  ReductionFailure failure;
};

/// Norm-one reduction at a boundary zero of g: v_j = psi^2 + y_j*(1-psi)^2
/// with psi = (1 + L_a(Phi))/2 built from a peak function Phi at the
/// boundary argmin of |g|.  The reduced tuple is certified by the region
/// dichotomy (sublevel of |g| vs. its complement), each side bounded by
/// certified structural estimates.  Requires the boundary minimum of |g|
/// to lie below opt.zero_tol (otherwise throws std::domain_error: the
/// hypothesis genuinely fails) and y to be a valid witness.
DiskOutcome disk_norm_one_reduce(const DiskTuple& f, const DiskElement& g,
                                 const DiskTuple& y, const DiskParams& params);

struct DiskSearchOutcome {
  bool ok = false;
  DiskTuple y;
  Certificate cert;  // invertibility certificate of f + y*g
  ReductionFailure failure;
};

/// Randomized search for a small-norm witness: y = 0 when f alone
/// certifies invertible, otherwise low-degree random draws with
/// coefficient sums scaled under `bound`.  Honest Failure when the budget
/// runs out (witnesses need not exist).
DiskSearchOutcome disk_small_norm_witness(const DiskTuple& f,
                                          const DiskElement& g, double bound,
                                          const DiskParams& params);

/// Re-run every certification of a disk witness from scratch: rebuilds the
/// multiplier from the stored parameters, compares coefficients, and
/// re-certifies the floor and the sup-norm enclosures.  Pass the options
/// the reduction ran with so the grid recomputations match.
VerifyReport disk_verify_witness(const DiskTuple& f, const DiskElement& g,
                                 const DiskWitness& w,
                                 const DiskOptions& opt = {});

}  // namespace stablerank::disk
