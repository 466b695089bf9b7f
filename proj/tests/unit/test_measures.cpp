#include <cmath>
#include <numbers>

#include "doctest.h"
#include "systolic/error.hpp"
#include "systolic/measures.hpp"

using namespace systolic;
constexpr double pi = std::numbers::pi;

namespace {

// Spheroid areas from the textbook closed forms.
double oblate_area(double a, double c) {
  const double e = std::sqrt(1 - c * c / (a * a));
  return 2 * pi * a * a * (1 + (1 - e * e) / e * std::atanh(e));
}
double prolate_area(double a, double c) {
  const double e = std::sqrt(1 - a * a / (c * c));
  return 2 * pi * a * a * (1 + c / (a * e) * std::asin(e));
}

// Area of the polar of the unit disk centred at (-a, 0), in polar
// coordinates: the support function of the disk gives the radial function.
double polar_area_trapezoid(double a, int n = 4000) {
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double phi = 2 * pi * i / n, c = std::cos(phi);
    const double q = 1 - a * a * c * c;
    const double rho = (-a * c + std::sqrt(a * a * c * c + q)) / q;
    sum += 0.5 * rho * rho;
  }
  return sum * 2 * pi / n;
}

}  // namespace

TEST_CASE("areas against closed forms") {
  CHECK(riemannian_area(Profile::round(1.0)) == doctest::Approx(4 * pi).epsilon(1e-12));
  CHECK(riemannian_area(Profile::round(3.0)) == doctest::Approx(36 * pi).epsilon(1e-12));
  CHECK(riemannian_area(ellipsoid(1.0, 0.5)) == doctest::Approx(oblate_area(1.0, 0.5)).epsilon(1e-10));
  CHECK(riemannian_area(ellipsoid(1.0, 2.0)) == doctest::Approx(prolate_area(1.0, 2.0)).epsilon(1e-10));
}

TEST_CASE("round contact volume with wind is 8 pi^2 / (1 - a^2)") {
  const auto p = Profile::round(1.0);
  for (double a : {0.0, 0.2, 0.5, -0.7}) {
    const double expect = 8 * pi * pi / (1 - a * a);
    CHECK(contact_volume_direct(p, {a}) == doctest::Approx(expect).epsilon(1e-11));
    CHECK(contact_volume_direct(p, {a}, VolumeMode::two_d) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(ht_area(p, {a}) == doctest::Approx(expect / (2 * pi)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(contact_volume_direct(p, {1.0}), InvalidInput);
}

TEST_CASE("closed-form and two-dimensional volume quadratures agree") {
  for (const auto& p : {ellipsoid(1.0, 0.5), dumbbell(1.0, 1.0)}) {
    const double a = 0.3 / p.r_max();
    CHECK(contact_volume_direct(p, {a}, VolumeMode::two_d) ==
          doctest::Approx(contact_volume_direct(p, {a})).epsilon(1e-9));
  }
}

TEST_CASE("holmes-thompson area from pointwise polar areas") {
  const auto p = Profile::round(1.0);
  const double a = 0.4;
  // HT = (1/pi) integral of |polar of the unit ball| dA
  const int n = 2000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double s = pi * (i + 0.5) / n, r = std::sin(s);
    sum += 2 * pi * r * polar_area_trapezoid(a * r, 400) / pi;
  }
  sum *= pi / n;
  CHECK(ht_area(p, {a}) == doctest::Approx(sum).epsilon(1e-6));
  CHECK(bh_area(p, {a}) == doctest::Approx(4 * pi).epsilon(1e-12));
}

TEST_CASE("polar ellipse area") {
  for (double a : {0.0, 0.3, 0.7, 0.9}) {
    CHECK(polar_ellipse_area_quadrature(a) == doctest::Approx(translated_disk_polar_area(a)).epsilon(1e-10));
    CHECK(polar_area_trapezoid(a) == doctest::Approx(translated_disk_polar_area(a)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(translated_disk_polar_area(1.0), InvalidInput);
}

TEST_CASE("volume from the generating function") {
  GridSpec g;
  g.nodes = 61;
  for (const auto& p : {Profile::round(1.0), ellipsoid(1.0, 0.5), dumbbell(1.0, 1.0)}) {
    const auto t = build_generating_table(p, g);
    const auto v = volume_report(p, {0.0}, t);
    CHECK(v.identity_defect < 1e-12);
    CHECK(v.via_F_defect < 1e-8);
    CHECK(annulus_volume(t) <= v.contact_volume_direct_a0 * (1 + 1e-9));
  }
  const auto t = build_generating_table(Profile::round(1.0), g);
  CHECK_THROWS_AS(contact_volume_via_F(ellipsoid(1.0, 0.5), t), InvalidInput);
}

TEST_CASE("volumes scale quadratically with a -> a / c") {
  const auto p = ellipsoid(1.0, 0.5);
  const auto q = p.scaled(2.0);
  CHECK(riemannian_area(q) == doctest::Approx(4 * riemannian_area(p)).epsilon(1e-11));
  CHECK(contact_volume_direct(q, {0.15}) == doctest::Approx(4 * contact_volume_direct(p, {0.3})).epsilon(1e-11));
}

TEST_CASE("holmes-thompson area grows with the wind") {
  const auto p = ellipsoid(1.0, 0.5);
  double prev = ht_area(p, {0.0});
  CHECK(prev == doctest::Approx(bh_area(p, {0.0})).epsilon(1e-12));
  for (double a : {0.1, 0.3, 0.6, 0.9}) {
    const double h = ht_area(p, {a});
    CHECK(h > prev);
    CHECK(ht_area(p, {-a}) == doctest::Approx(h).epsilon(1e-13));
    prev = h;
  }
}
