#ifndef STABLERANK_TESTS_SUPPORT_ORACLES_HPP
#define STABLERANK_TESTS_SUPPORT_ORACLES_HPP

// Test-side oracles, deliberately kept independent of the library's
// certification pipeline: dense sampling, elementary geometry, exhaustive
// subset enumeration, and root-constructed polynomials.  Every oracle is a
// small brute-force computation whose correctness is obvious by inspection,
// so a disagreement always indicts the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stablerank/certify.hpp"
#include "stablerank/disk.hpp"

namespace oracles {

using stablerank::Complex;

// --------------------------------------------------------------------------
// Dense sampling over a mesh
// --------------------------------------------------------------------------

inline std::vector<stablerank::MeshPoint> sample_points(
    const stablerank::MeshPtr& mesh, int count, std::uint64_t seed) {
  stablerank::Rng rng(seed);
  std::vector<stablerank::MeshPoint> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts.push_back(sample_point(*mesh, rng));
  return pts;
}

inline double tuple_magnitude_at(const stablerank::PLTuple& t,
                                 const stablerank::MeshPoint& p) {
  double sq = 0.0;
  for (int j = 0; j < t.n(); ++j) {
    const Complex v = t[j].eval(p);
    sq += v.real() * v.real() + v.imag() * v.imag();
  }
  return std::sqrt(sq);
}

/// Smallest sampled aggregate magnitude of a PL tuple (an upper bound for
/// the true minimum; tight for large sample counts).
inline double sampled_min_magnitude(const stablerank::PLTuple& t, int count,
                                    std::uint64_t seed) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : sample_points(t.mesh(), count, seed))
    best = std::min(best, tuple_magnitude_at(t, p));
  return best;
}

/// Same for a piecewise-quadratic expression (true product semantics).
inline double sampled_min_magnitude(const stablerank::QuadExpr& e, int count,
                                    std::uint64_t seed) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : sample_points(e.mesh(), count, seed))
    best = std::min(best, e.magnitude(p));
  return best;
}

/// Largest sampled modulus of a scalar PL function (lower bound for the sup).
inline double sampled_max_modulus(const stablerank::PLFunction& f, int count,
                                  std::uint64_t seed) {
  double best = 0.0;
  for (const auto& p : sample_points(f.mesh(), count, seed))
    best = std::max(best, stablerank::modulus(f.eval(p)));
  return best;
}

// --------------------------------------------------------------------------
// Elementary geometry: distance from the origin to a segment in the plane
// --------------------------------------------------------------------------

/// Closed-form distance from 0 to the segment [a, b] treated as points of
/// R^2.  This is the exact minimum of a scalar PL function on one mesh
/// segment with endpoint values a and b.
inline double segment_min_distance(Complex a, Complex b) {
  const double dx = b.real() - a.real();
  const double dy = b.imag() - a.imag();
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = -(a.real() * dx + a.imag() * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  return std::hypot(a.real() + t * dx, a.imag() + t * dy);
}

// --------------------------------------------------------------------------
// Exhaustive subset enumeration (intended for tuples of length <= 3)
// --------------------------------------------------------------------------

inline bool mask_invertible(const stablerank::PLTuple& u, unsigned mask) {
  std::vector<int> keep;
  for (int j = 0; j < u.n(); ++j)
    if (mask & (1u << j)) keep.push_back(j);
  if (keep.empty()) return false;
  const stablerank::PLTuple sub = stablerank::subtuple(u, keep);
  return stablerank::min_modulus_pl(sub).cert.value > 0.0;
}

/// Inclusion-minimality of a kept index set: the set itself is invertible
/// and every proper nonempty subset is not.
inline bool is_inclusion_minimal(const stablerank::PLTuple& u,
                                 const std::vector<int>& kept) {
  unsigned mask = 0;
  for (int j : kept) mask |= 1u << j;
  if (!mask_invertible(u, mask)) return false;
  for (unsigned sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask)
    if (mask_invertible(u, sub)) return false;
  return true;
}

// --------------------------------------------------------------------------
// Polynomials with chosen roots (winding / zero-count oracle)
// --------------------------------------------------------------------------

/// lead * prod_k (z - roots[k]), ascending coefficients.  The number of
/// zeros inside the unit disk is known by construction, so this doubles as
/// an argument-principle oracle with no numerics beyond the product.
inline stablerank::disk::Poly poly_from_roots(const std::vector<Complex>& roots,
                                              Complex lead) {
  stablerank::disk::Poly p = stablerank::disk::Poly::constant(lead);
  for (const Complex& r : roots) {
    stablerank::disk::Poly factor;
    factor.coeff = {-r, Complex(1.0, 0.0)};
    p = stablerank::disk::p_mul(p, factor);
  }
  return p;
}

inline int roots_inside_unit_disk(const std::vector<Complex>& roots) {
  int inside = 0;
  for (const Complex& r : roots)
    if (stablerank::modulus(r) < 1.0) ++inside;
  return inside;
}

// --------------------------------------------------------------------------
// Dense sampling over the closed unit disk / its boundary circle
// --------------------------------------------------------------------------

inline double boundary_sampled_max(const stablerank::disk::DiskElement& h,
                                   int samples) {
  double best = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double th = 2.0 * 3.141592653589793 * k / samples;
    const Complex z(std::cos(th), std::sin(th));
    best = std::max(best, stablerank::modulus(de_eval(h, z)));
  }
  return best;
}

inline double disk_sampled_min(const stablerank::disk::DiskTuple& t, int rings,
                               int spokes) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= rings; ++i) {
    const double r = static_cast<double>(i) / rings;
    for (int k = 0; k < spokes; ++k) {
      const double th = 2.0 * 3.141592653589793 * k / spokes;
      const Complex z(r * std::cos(th), r * std::sin(th));
      double sq = 0.0;
      for (int j = 0; j < t.n(); ++j) {
        const Complex v = de_eval(t[j], z);
        sq += v.real() * v.real() + v.imag() * v.imag();
      }
      best = std::min(best, std::sqrt(sq));
    }
  }
  return best;
}

}  // namespace oracles

#endif  // STABLERANK_TESTS_SUPPORT_ORACLES_HPP
