#include <cmath>
#include <vector>

#include "doctest.h"
#include "stablerank/disk.hpp"
#include "support/oracles.hpp"

using namespace stablerank;
using namespace stablerank::disk;

namespace {

Poly linear(Complex c0, Complex c1) {
  Poly p;
  p.coeff = {c0, c1};
  return p;
}

Complex circle_point(double theta) {
  return Complex(std::cos(theta), std::sin(theta));
}

}  // namespace

TEST_SUITE("disk") {

TEST_CASE("polynomial arithmetic basics") {
  Poly z = Poly::z();
  Poly z2 = p_mul(z, z);
  REQUIRE(z2.degree() == 2);
  CHECK(modulus(z2.coeff[0]) == 0.0);
  CHECK(modulus(z2.coeff[1]) == 0.0);
  CHECK(z2.coeff[2].real() == 1.0);
  CHECK(z2.eval(Complex(0.5, 0.5)) == Complex(0.5, 0.5) * Complex(0.5, 0.5));
  CHECK(Poly::zero().degree() == -1);
  CHECK(coeff_abs_sum(linear(Complex(3, 4), Complex(0, 1))) ==
        doctest::Approx(6.0));
  CHECK(deriv_abs_sum(z2) == doctest::Approx(2.0));
}

TEST_CASE("quotient elements certify their denominators") {
  // (z - 1/2)/(1 - z/2): denominator minimum 1/2 on the closed disk
  DiskElement mob = element(linear(Complex(-0.5, 0), Complex(1, 0)),
                            linear(Complex(1, 0), Complex(-0.5, 0)));
  CHECK(mob.den_lower >= 0.45);
  CHECK(mob.den_lower <= 0.5 + 1e-9);
  CHECK(modulus(de_eval(mob, Complex(1, 0)) - Complex(1, 0)) <= 1e-12);

  // a denominator vanishing inside the disk is rejected outright
  CHECK_THROWS_AS(element(Poly::one(), Poly::z()), std::domain_error);
}

TEST_CASE("element arithmetic evaluates pointwise") {
  DiskElement a = element(linear(Complex(1, 0), Complex(2, 0)));
  DiskElement b = element(linear(Complex(0, 1), Complex(-1, 0)),
                          linear(Complex(2, 0), Complex(0.5, 0)));
  const Complex z(0.3, -0.4);
  const Complex va = de_eval(a, z), vb = de_eval(b, z);
  CHECK(modulus(de_eval(de_add(a, b), z) - (va + vb)) <= 1e-12);
  CHECK(modulus(de_eval(de_mul(a, b), z) - va * vb) <= 1e-12);
  CHECK(modulus(de_eval(de_pow(b, 3), z) - vb * vb * vb) <= 1e-11);
  CHECK(modulus(de_eval(de_shift(a, Complex(0, 2)), z) - (va + Complex(0, 2))) <=
        1e-12);
}

TEST_CASE("Moebius maps fix the poles of the unit circle and kill a") {
  Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.05, 0.95);
    DiskElement L = mobius_compose(element(Poly::z()), a);
    CHECK(modulus(de_eval(L, Complex(1, 0)) - Complex(1, 0)) <= 1e-12);
    CHECK(modulus(de_eval(L, Complex(-1, 0)) - Complex(-1, 0)) <= 1e-12);
    CHECK(modulus(de_eval(L, Complex(a, 0))) <= 1e-12);
    for (int k = 0; k < 16; ++k) {
      const Complex z = circle_point(0.3927 * k);
      CHECK(std::abs(modulus(de_eval(L, z)) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("Moebius parameter moves the far region next to minus one") {
  for (double eta : {0.1, 0.5, 0.9}) {
    for (double eps : {0.02, 0.1, 0.5}) {
      MobiusParams mp = mobius_param(eta, eps);
      CHECK(mp.a == 1.0 - eps * eta / 8.0);
      DiskElement L = mobius_compose(element(Poly::z()), mp.a);
      Rng rng(53);
      int checked = 0;
      while (checked < 2000) {
        const Complex z = rng.unit_disk();
        if (modulus(z - Complex(1, 0)) < eta) continue;
        ++checked;
        CHECK(modulus(de_eval(L, z) + Complex(1, 0)) < eps);
      }
    }
  }
  CHECK_THROWS_AS(mobius_param(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mobius_param(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("peak functions peak at their boundary point and nowhere else") {
  Rng rng(55);
  for (int m : {2, 8}) {
    const Complex zeta = rng.unit_circle();
    DiskElement phi = peak_function(zeta, m);
    CHECK(modulus(de_eval(phi, zeta) - Complex(1, 0)) <= 1e-12);
    BoundPair sup = disk_sup_norm(phi);
    CHECK(sup.upper <= 1.0 + 1e-6);
    CHECK(sup.lower <= sup.upper);
  }

  DiskElement phi2 = peak_function(Complex(1, 0), 2);
  CHECK(de_eval(phi2, Complex(-1, 0)).real() == doctest::Approx(0.25));
  CHECK(de_eval(phi2, Complex(-1, 0)).imag() == doctest::Approx(0.0));

  // off-peak boundary mass decays monotonically in the power
  double prev = 2.0;
  for (int m : {2, 4, 8, 16}) {
    DiskElement phi = peak_function(Complex(1, 0), m);
    double worst = 0.0;
    for (int k = 0; k < 4000; ++k) {
      const Complex z = circle_point(2.0 * 3.141592653589793 * k / 4000);
      if (modulus(z - Complex(1, 0)) < 0.5) continue;
      worst = std::max(worst, modulus(de_eval(phi, z)));
    }
    CHECK(worst < prev);
    prev = worst;
  }
}

TEST_CASE("sup-norm enclosures bracket the boundary maximum") {
  BoundPair one = disk_sup_norm(element(Poly::one()));
  CHECK(one.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.upper == doctest::Approx(1.0).epsilon(1e-12));

  Poly zk = Poly::z();
  for (int i = 0; i < 4; ++i) zk = p_mul(zk, Poly::z());
  BoundPair z5 = disk_sup_norm(element(zk));  // |z^5| = 1 on the circle
  CHECK(z5.lower >= 1.0 - 1e-6);
  CHECK(z5.upper <= 1.0 + 1e-6);

  BoundPair half = disk_sup_norm(element(
      linear(Complex(0.5, 0), Complex(0.5, 0))));  // (1+z)/2 peaks at 1
  CHECK(half.lower >= 1.0 - 1e-6);
  CHECK(half.upper <= 1.0 + 1e-6);

  // a genuine quotient: enclosure straddles the sampled maximum
  DiskElement mob = element(linear(Complex(-0.5, 0), Complex(1, 0)),
                            linear(Complex(1, 0), Complex(-0.5, 0)));
  BoundPair q = disk_sup_norm(mob);
  const double sampled = oracles::boundary_sampled_max(mob, 20000);
  CHECK(q.lower <= sampled + 1e-9);
  CHECK(q.upper >= sampled - 1e-9);
  CHECK(q.upper - q.lower <= 1e-4);
}

TEST_CASE("scalar invertibility follows the argument principle") {
  DiskInvertibleResult inside = disk_check_invertible(element(Poly::z()));
  CHECK(inside.conclusive);
  CHECK_FALSE(inside.invertible);

  DiskInvertibleResult outside =
      disk_check_invertible(element(linear(Complex(-2, 0), Complex(1, 0))));
  CHECK(outside.conclusive);
  CHECK(outside.invertible);
  CHECK(outside.cert.value > 0.5);
}

TEST_CASE("tuple invertibility is certified through the sampled grid") {
  DiskTuple t;
  t.comps = {element(Poly::z()),
             element(linear(Complex(1, 0), Complex(-2, 0)))};
  DiskInvertibleResult r = disk_check_invertible(t);
  CHECK(r.conclusive);
  CHECK(r.invertible);
  CHECK(r.cert.value > 0.0);
  CHECK(r.cert.value <= oracles::disk_sampled_min(t, 160, 320) + 1e-9);

  DiskMinBound mb = disk_min_magnitude(t);
  CHECK(mb.ok);
  CHECK(mb.value > 0.0);
  CHECK(mb.value <= oracles::disk_sampled_min(t, 160, 320) + 1e-9);
}

TEST_CASE("winding numbers agree with root-constructed polynomials") {
  Rng rng(57);
  int accepted = 0;
  while (accepted < 300) {
    const int deg = rng.uniform_int(1, 6);
    std::vector<Complex> roots;
    const Complex lead = rng.unit_circle() * rng.uniform(0.5, 2.0);
    double pred_lower = modulus(lead);  // |p| >= |lead| prod |1 - |root||
    double pred_scale = modulus(lead);
    for (int k = 0; k < deg; ++k) {
      // keep every root at distance >= 0.05 from the circle
      const double r = (rng.uniform01() < 0.5) ? rng.uniform(0.0, 0.95)
                                               : rng.uniform(1.05, 2.0);
      roots.push_back(rng.unit_circle() * r);
      pred_lower *= std::abs(1.0 - r);
      pred_scale *= 1.0 + r;
    }
    // skip draws whose boundary minimum provably cannot be resolved at the
    // certifier's sample budget (decisiveness is not promised for them)
    if (pred_lower * static_cast<double>(1 << 21) < 128.0 * pred_scale)
      continue;
    ++accepted;
    Poly p = oracles::poly_from_roots(roots, lead);
    WindingResult w = disk_winding(p);
    REQUIRE(w.decisive);
    CHECK(w.winding == oracles::roots_inside_unit_disk(roots));
  }
}

TEST_CASE("norm-one reduction over the disk algebra") {
  DiskTuple f;
  f.comps = {element(Poly::z()),
             element(linear(Complex(1, 0), Complex(-2, 0)))};
  DiskElement g = element(linear(Complex(-0.5, 0), Complex(0.5, 0)));

  DiskParams params;
  params.seed = 59;

  DiskTuple zero_y;
  zero_y.comps = {element(Poly::zero()), element(Poly::zero())};
  DiskOutcome out = disk_norm_one_reduce(f, g, zero_y, params);
  REQUIRE(out.ok);
  const DiskWitness& w = out.witness;
  CHECK(w.floor > 0.0);
  REQUIRE(w.sup_bounds.size() == 2);
  for (const BoundPair& bp : w.sup_bounds) {
    CHECK(bp.lower >= 1.0 - 1e-6);
    CHECK(bp.upper <= 1.0 + 1e-6);
  }
  // the multiplier equals one at the boundary zero of g
  for (int j = 0; j < w.multiplier.n(); ++j)
    CHECK(modulus(de_eval(w.multiplier[j], w.zeta0) - Complex(1, 0)) <= 1e-9);
  // the reduced tuple really stays above the floor on a dense grid
  CHECK(oracles::disk_sampled_min(w.reduced, 120, 240) >= w.floor - 1e-9);
  CHECK(disk_verify_witness(f, g, w, params.options).ok);

  SUBCASE("a corrupted multiplier coefficient is caught on re-verify") {
    DiskWitness bad = w;
    bad.multiplier[0].num.coeff[0] += Complex(0.25, 0.0);
    CHECK_FALSE(disk_verify_witness(f, g, bad, params.options).ok);
  }

  SUBCASE("a blended witness passes the same gates") {
    DiskTuple y;
    y.comps = {element(Poly::constant(Complex(0.1, 0.0))),
               element(Poly::constant(Complex(0.0, -0.1)))};
    DiskOutcome blended = disk_norm_one_reduce(f, g, y, params);
    REQUIRE(blended.ok);
    for (const BoundPair& bp : blended.witness.sup_bounds) {
      CHECK(bp.lower >= 1.0 - 1e-6);
      CHECK(bp.upper <= 1.0 + 1e-6);
    }
    CHECK(disk_verify_witness(f, g, blended.witness, params.options).ok);
  }
}

TEST_CASE("the boundary-zero hypothesis is genuinely required") {
  DiskTuple f;
  f.comps = {element(Poly::z()),
             element(linear(Complex(1, 0), Complex(-2, 0)))};
  DiskElement g = element(Poly::one());
  DiskTuple zero_y;
  zero_y.comps = {element(Poly::zero()), element(Poly::zero())};
  DiskParams params;
  CHECK_THROWS_AS(disk_norm_one_reduce(f, g, zero_y, params),
                  std::domain_error);
}

TEST_CASE("small-norm witness search over the disk") {
  DiskParams params;
  params.seed = 61;

  // an invertible tuple needs no help: the zero witness returns at once
  DiskTuple f;
  f.comps = {element(Poly::z()),
             element(linear(Complex(1, 0), Complex(-2, 0)))};
  DiskElement g = element(linear(Complex(-0.5, 0), Complex(0.5, 0)));
  DiskSearchOutcome hit = disk_small_norm_witness(f, g, 0.4, params);
  REQUIRE(hit.ok);
  for (int j = 0; j < hit.y.n(); ++j) CHECK(hit.y[j].num.is_zero());

  // a scalar winding obstruction defeats the search budget honestly
  DiskTuple lone;
  lone.comps = {element(Poly::z())};
  DiskParams tight;
  tight.seed = 61;
  tight.max_attempts = 8;
  DiskSearchOutcome miss = disk_small_norm_witness(lone, g, 0.4, tight);
  CHECK_FALSE(miss.ok);
  CHECK_FALSE(miss.failure.reason.empty());

  CHECK_THROWS_AS(disk_small_norm_witness(f, g, 0.7, params),
                  std::invalid_argument);
}

}  // TEST_SUITE
