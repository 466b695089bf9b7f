#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "systolic/error.hpp"
#include "systolic/geodesic_flow.hpp"

using namespace systolic;
constexpr double pi = std::numbers::pi;

TEST_CASE("reeb field on the round sphere") {
  const auto p = Profile::round(1.0);
  const UnitTangentState u{0.3, 0.4, 1.1};
  const auto v = reeb_field(u, p, {0.25});
  CHECK(v.dtheta == doctest::Approx(std::cos(0.4) / std::sin(1.1) + 0.25).epsilon(1e-14));
  CHECK(v.dbeta == doctest::Approx(std::cos(1.1) * std::cos(0.4) / std::sin(1.1)).epsilon(1e-14));
  CHECK(v.ds == doctest::Approx(std::sin(0.4)).epsilon(1e-14));
  CHECK(clairaut(u, p) == doctest::Approx(std::sin(1.1) * std::cos(0.4)).epsilon(1e-14));
  CHECK_THROWS_AS(reeb_field({0, 0, 0.0}, p, {0}), InvalidInput);
}

TEST_CASE("wind limit") {
  const auto p = ellipsoid(2.0, 1.0);
  CHECK_NOTHROW(validate_wind(p, {0.49}));
  CHECK_THROWS_AS(validate_wind(p, {0.5}), InvalidInput);
  CHECK_THROWS_AS(validate_wind(p, {-0.6}), InvalidInput);
}

TEST_CASE("reeb vectors have unit Finsler norm, and the norm is positively homogeneous") {
  const auto p = ellipsoid(1.0, 0.5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> S(0.05, p.half_length() - 0.05), B(0, 2 * pi),
      A(-0.9, 0.9);
  for (int i = 0; i < 200; ++i) {
    const double s = S(rng), beta = B(rng), a = A(rng);
    const auto v = reeb_field({0, beta, s}, p, {a});
    CHECK(finsler_norm(p, {a}, s, v.dtheta, v.ds) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(finsler_norm(p, {a}, s, 3 * v.dtheta, 3 * v.ds) == doctest::Approx(3.0).epsilon(1e-12));
  }
  // a = 0 is the Riemannian norm
  const double s = 0.8, r = p.r(s);
  CHECK(finsler_norm(p, {0}, s, 0.3, 0.4) == doctest::Approx(std::hypot(r * 0.3, 0.4)).epsilon(1e-14));
  CHECK_THROWS_AS(finsler_norm(p, {0}, s, 0, 0), InvalidInput);
}

TEST_CASE("great circles close up with period 2 pi") {
  const auto p = Profile::round(1.0);
  const auto tr = integrate({0.0, 0.9, 0.6}, p, {0}, 2 * pi);
  const auto e = tr.end();
  CHECK(e.s == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(std::remainder(e.beta - 0.9, 2 * pi) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(tr.max_clairaut_drift() < 1e-9);
}

TEST_CASE("riemannian flow is reversible") {
  const auto p = ellipsoid(1.0, 0.5);
  const UnitTangentState u{0.0, 0.7, 0.5};
  const auto fwd = integrate(u, p, {0}, 12.0);
  auto back_start = fwd.end();
  back_start.beta += pi;
  const auto back = integrate(back_start, p, {0}, 12.0).end();
  CHECK(back.s == doctest::Approx(u.s).epsilon(1e-7));
  CHECK(back.theta == doctest::Approx(u.theta).epsilon(1e-7));
  CHECK(std::remainder(back.beta - pi - u.beta, 2 * pi) == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("clairaut integral is conserved with wind") {
  const auto p = dumbbell(1.0, 1.0);
  const auto tr = integrate({0.0, 1.0, 1.2}, p, {0.2}, 50.0);
  CHECK(tr.max_clairaut_drift() < 1e-8);
  const auto samples = tr.sample(20, p);
  REQUIRE(samples.size() == 21);
  for (const auto& x : samples) CHECK(x.K == doctest::Approx(tr.clairaut_initial()).epsilon(1e-8));
}

TEST_CASE("equator with wind advances theta at rate 1/r + a") {
  const auto p = Profile::round(1.0);
  const double s0 = pi / 2, a = 0.5;
  const double len = 2 * pi / (1 + a);
  const auto e = integrate({0.0, 0.0, s0}, p, {a}, len).end();
  CHECK(e.theta == doctest::Approx(2 * pi).epsilon(1e-9));
  CHECK(e.s == doctest::Approx(s0).epsilon(1e-12));
}

TEST_CASE("upward crossings") {
  const auto p = Profile::round(1.0);
  // beta in (pi/2, pi): starts going up, comes back up after one period
  const auto hit = first_upward_crossing({0, 2.0, pi / 2}, p, {0}, pi / 2, 20.0);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(2 * pi).epsilon(1e-9));
  CHECK(hit->state.theta == doctest::Approx(-2 * pi).epsilon(1e-9));
  // a level the geodesic never reaches
  CHECK_FALSE(first_upward_crossing({0, 0.1, pi / 2}, p, {0}, 0.3, 30.0));
}

TEST_CASE("classification") {
  const auto ob = ellipsoid(1.0, 0.5);
  const double s0 = ob.minimal_equator().s0;
  CHECK(classify({0, pi / 2, 0.4}, ob, {0}).tag == GeodesicTag::meridian);
  CHECK(classify({0, 0.0, s0}, ob, {0}).tag == GeodesicTag::equator);
  const auto osc = classify({0, 0.8, s0}, ob, {0});
  CHECK(osc.tag == GeodesicTag::oscillating);
  CHECK(ob.r(osc.s1) == doctest::Approx(std::abs(osc.K)).epsilon(1e-8));
  CHECK(ob.r(osc.s2) == doctest::Approx(std::abs(osc.K)).epsilon(1e-8));

  // dumbbell: K equal to the waist radius, launched from a bulge toward the waist
  const auto db = dumbbell(1.0, 1.0);
  const auto me = db.minimal_equator();
  double s_bulge = 0;
  for (const auto& e : db.equators()) {
    if (e.kind == EquatorKind::max && e.s_c < me.s0) s_bulge = e.s_c;
  }
  const double beta = std::acos(me.r_min / db.r(s_bulge));
  const auto asym = classify({0, beta, s_bulge}, db, {0});
  CHECK(asym.tag == GeodesicTag::asymptotic_to_equator);
  CHECK(asym.s_limit == doctest::Approx(me.s0).epsilon(1e-9));
}
