#include <cmath>
#include <numbers>

#include "doctest.h"
#include "systolic/error.hpp"
#include "systolic/finsler.hpp"

using namespace systolic;
constexpr double pi = std::numbers::pi;

namespace {

GridSpec grid(std::size_t n) {
  GridSpec g;
  g.nodes = n;
  return g;
}

const Profile& oblate() {
  static const Profile p = ellipsoid(1.0, 0.5);
  return p;
}
const GeneratingTable& oblate_table() {
  static const GeneratingTable t = build_generating_table(oblate(), grid(101));
  return t;
}
const GeneratingTable& round_table() {
  static const GeneratingTable t = build_generating_table(Profile::round(1.0), grid(61));
  return t;
}

}  // namespace

TEST_CASE("round sphere: F_a = 2 pi (1 + a eta)") {
  const auto ft = build_finsler_table(round_table(), 0.3);
  for (std::size_t j = 0; j < ft.size(); ++j) {
    CHECK(ft.T[j] == doctest::Approx(2 * pi * ft.eta()[j]).scale(1.0).epsilon(1e-8));
    CHECK(ft.Fa[j] == doctest::Approx(2 * pi * (1 + 0.3 * ft.eta()[j])).epsilon(1e-8));
  }
  const auto fp = fixed_points(ft, Profile::round(1.0));
  CHECK(fp.constant_shift);
  CHECK_FALSE(fp.continuum);
  CHECK(fp.shift == doctest::Approx(0.3 * 2 * pi).epsilon(1e-8));
  CHECK(fp.points.empty());

  const auto f0 = fixed_points(build_finsler_table(round_table(), 0.0), Profile::round(1.0));
  CHECK(f0.constant_shift);
  CHECK(f0.continuum);
}

TEST_CASE("a = 0 leaves F unchanged") {
  const auto ft = build_finsler_table(oblate_table(), 0.0);
  for (std::size_t j = 0; j < ft.size(); ++j) CHECK(ft.Fa[j] == oblate_table().F[j]);
  CHECK(ft.max_T_disagreement < 1e-8);
  // T' = tau > 0
  for (std::size_t j = 1; j + 1 < ft.size(); ++j) CHECK(ft.T[j] > ft.T[j - 1]);
}

TEST_CASE("endpoint values and sign of F_a - F") {
  const auto& t = oblate_table();
  const double a = 0.35, ar = a * t.r_min;
  const auto ft = build_finsler_table(t, a);
  CHECK(ft.Fa_plus - t.F_end == doctest::Approx(-ar * t.F_end + 2 * ar * t.int_F_0_1).epsilon(1e-12));
  // closed forms against F + a r_min T at the end nodes (independent end panels)
  CHECK(ft.Fa_plus == doctest::Approx(ft.Fa.back()).epsilon(1e-9));
  CHECK(ft.Fa_minus == doctest::Approx(ft.Fa.front()).epsilon(1e-9));
  for (std::size_t j = 0; j < ft.size(); ++j) {
    const double eta = ft.eta()[j];
    if (eta < 0) CHECK(ft.Fa[j] < t.F[j]);
    if (eta > 0) CHECK(ft.Fa[j] > t.F[j]);
  }
}

TEST_CASE("F_{-a}(eta) = F_a(-eta)") {
  const auto& t = oblate_table();
  const auto plus = build_finsler_table(t, 0.4), minus = build_finsler_table(t, -0.4);
  const std::size_t n = t.size();
  for (std::size_t j = 0; j < n; ++j) {
    CHECK(minus.Fa[j] == doctest::Approx(plus.Fa[n - 1 - j]).epsilon(1e-9));
  }
}

TEST_CASE("wind bound and T disagreement are enforced") {
  CHECK_THROWS_AS(build_finsler_table(oblate_table(), 1.0), InvalidInput);
  auto bad = oblate_table();
  bad.T_quad[7] += 1e-5;
  CHECK_THROWS_AS(build_finsler_table(bad, 0.2), NumericalFailure);
}

TEST_CASE("oblate fixed points") {
  const auto f0 = fixed_points(build_finsler_table(oblate_table(), 0.0), oblate());
  REQUIRE(f0.points.size() == 1);
  CHECK(f0.points[0].eta == 0.0);
  CHECK(f0.points[0].length == doctest::Approx(oblate().M()).epsilon(1e-14));

  // with wind the root moves to eta < 0 and is a zero of f + a r_min tau
  const auto ft = build_finsler_table(oblate_table(), 0.2);
  const auto fp = fixed_points(ft, oblate());
  REQUIRE(fp.points.size() == 1);
  const double eta = fp.points[0].eta;
  CHECK(eta < 0);
  const auto fr = first_return(eta, oblate());
  const double L = oblate_table().L;
  CHECK(std::abs(f_from_winding(eta, fr.W, L) + 0.2 * fr.tau) < 1e-8);
  CHECK(fp.points[0].length == doctest::Approx(fr.tau).epsilon(1e-12));
}

TEST_CASE("prop1 on the round sphere fails its hypothesis") {
  for (double a : {0.1, 0.3, 0.6, -0.3}) {
    const auto r = prop1_search(build_finsler_table(round_table(), a), Profile::round(1.0));
    CHECK(r.outcome == Prop1Outcome::hypothesis_failed);
    CHECK(r.int_F == doctest::Approx(2 * pi).epsilon(1e-9));
  }
  CHECK_THROWS_AS(prop1_search(build_finsler_table(round_table(), 0.0), Profile::round(1.0)),
                  InvalidInput);
}

TEST_CASE("prop1 on an oblate ellipsoid") {
  const auto& t = oblate_table();
  const auto r = prop1_search(build_finsler_table(t, 0.1), oblate());
  REQUIRE(r.outcome == Prop1Outcome::found);
  // F is minimal at the meridian for this ellipsoid
  CHECK(r.eta_bar == 0.0);
  CHECK(r.F_bar == doctest::Approx(oblate().M()).epsilon(1e-12));
  CHECK(r.eta_hat < r.eta_bar);
  CHECK(r.tau_hat < r.F_bar);
  CHECK(r.F_bar < r.ell0);
  CHECK(r.conclusion_holds);
  CHECK(r.g_increasing);
  CHECK(r.tau_hat == doctest::Approx(r.g_hat).epsilon(1e-6));
  CHECK(r.Fa_prime_bar > 0);

  // conjugate wind: same search, mirrored
  const auto m = prop1_search(build_finsler_table(t, -0.1), oblate());
  CHECK(m.mirrored);
  CHECK(m.eta_hat == doctest::Approx(r.eta_hat).epsilon(1e-10));
}

TEST_CASE("prop1 hypothesis boundary counts as satisfied") {
  auto t = oblate_table();
  const double L = t.L, I = t.int_F_0_1;
  // wind for which (L/2)(1 + 1/(1 + a)^2) is int_0^1 F
  const double a = (1.0 / std::sqrt(2 * I / L - 1) - 1.0) / t.r_min;
  const double ar = a * t.r_min;
  const double bound = 0.5 * L * (1.0 + 1.0 / ((1.0 + ar) * (1.0 + ar)));
  t.int_F_0_1 = bound;  // land exactly on it
  const auto r = prop1_search(build_finsler_table(t, a), oblate());
  CHECK(r.int_F == r.bound);
  CHECK(r.outcome == Prop1Outcome::found);
}

TEST_CASE("minimize_F breaks ties toward 0") {
  const auto [eta, F] = minimize_F(round_table(), Profile::round(1.0), -1.0, 0.0);
  CHECK(eta == 0.0);
  CHECK(F == doctest::Approx(2 * pi).epsilon(1e-12));
}
