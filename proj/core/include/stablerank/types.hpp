#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace stablerank {

using Complex = std::complex<double>;

/// Scalar field of a function space: real- or complex-valued functions.
enum class Field { Real, Complex };

inline const char* field_name(Field f) {
  return f == Field::Real ? "real" : "complex";
}

/// Modulus of a scalar value; uses hypot for overflow-free accuracy.
inline double modulus(const Complex& z) {
  return std::hypot(z.real(), z.imag());
}

/// Rescale z so that modulus(result) == 1.0 exactly (bit-level).
///
/// A single division by |z| can land one ulp off unit modulus, so iterate:
/// each pass divides by the freshly computed modulus, and the iteration stops
/// only when the computed modulus is exactly 1.0.  Converges in a couple of
/// steps for any nonzero finite input; throws on zero.
Complex normalize_to_unit(Complex z);

/// Clamp the modulus of z to at most cap (in computed arithmetic, exactly).
/// Values already within the cap are returned unchanged.
Complex clip_modulus(Complex z, double cap);

/// Deterministic random source.
///
/// Wraps the bit-exact std::mt19937_64 engine but implements its own value
/// distributions, because the standard library's distribution objects are
/// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : origin_(seed), engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Uniform point of the closed unit disk (rejection from the square).
  Complex unit_disk() {
    for (;;) {
      const double x = uniform(-1.0, 1.0);
      const double y = uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) return {x, y};
    }
  }

  /// Uniform point of the unit circle.
  Complex unit_circle() {
    const double t = uniform(0.0, 2.0 * 3.141592653589793);
    return {std::cos(t), std::sin(t)};
  }

  /// Independent substream: deterministic function of (origin seed, tag).
  Rng fork(std::uint64_t tag) const {
    return Rng(mix(origin_ ^ ((tag + 1) * 0x9e3779b97f4a7c15ULL)));
  }

  /// Substream from a base seed and two ladder coordinates (refinement,
  /// attempt).  Pure function of its arguments.
  static Rng from(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return Rng(mix(mix(seed ^ (a * 0xbf58476d1ce4e5b9ULL)) ^
                   (b * 0x94d049bb133111ebULL)));
  }

 private:
  // splitmix64 finalizer: decorrelates nearby seeds before engine seeding.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t origin_;
  std::mt19937_64 engine_;
};

}  // namespace stablerank
