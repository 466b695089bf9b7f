#include <cmath>
#include <numbers>

#include "doctest.h"
#include "systolic/error.hpp"
#include "systolic/return_map.hpp"

using namespace systolic;
constexpr double pi = std::numbers::pi;

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.nodes = 61;
  return g;
}

const GeneratingTable& oblate_table() {
  static const GeneratingTable t = build_generating_table(ellipsoid(1.0, 0.5), small_grid());
  return t;
}

}  // namespace

TEST_CASE("round sphere: every orbit returns after 2 pi with winding -1 or +1") {
  const auto p = Profile::round(1.0);
  for (double eta : {-0.9, -0.3, 0.2, 0.7}) {
    const auto fr = first_return(eta, p);
    CHECK(fr.tau == doctest::Approx(2 * pi).epsilon(1e-9));
    CHECK(fr.W == doctest::Approx(eta > 0 ? -1.0 : 1.0).epsilon(1e-9));
    CHECK(f_from_winding(eta, fr.W, 2 * pi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    CHECK(F_area(eta, p) == doctest::Approx(2 * pi).epsilon(1e-11));
  }
  const auto zero = first_return(0.0, p);
  CHECK(zero.tau == 2 * pi);
  CHECK(zero.W == 1.0);
  CHECK_THROWS_AS(first_return(1.0, p), InvalidInput);
  CHECK_THROWS_AS(F_area(1.5, p), InvalidInput);
}

TEST_CASE("F_area at the ends and at 0") {
  const auto p = ellipsoid(1.0, 0.5);
  CHECK(F_area(0.0, p) == p.M());
  // unique equator: the Gamma integrals vanish and F(+-1) = L
  const auto g = gamma_integrals(p);
  CHECK(g.cos_part == 0.0);
  CHECK(g.r_part == 0.0);
  CHECK(F_area(1.0, p) == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(F_area(-1.0 + 1e-7, p) == doctest::Approx(2 * pi).epsilon(1e-5));
}

TEST_CASE("dumbbell has positive Gamma integrals") {
  const auto p = dumbbell(1.0, 1.0);
  const auto g = gamma_integrals(p);
  CHECK(g.cos_part > 0.1);
  CHECK(g.r_part > 0.1);
  // the Gamma term of the volume is nonnegative pointwise: 2 pi r acos(k/r) >= L sqrt(1 - k^2/r^2)
  CHECK(4 * pi * g.r_part - 2 * p.minimal_equator().L * g.cos_part > 0.0);
}

TEST_CASE("grid nodes are symmetric and include -1, 0, 1") {
  GridSpec g;
  g.nodes = 21;
  const auto eta = grid_nodes(g);
  REQUIRE(eta.size() == 21);
  CHECK(eta.front() == -1.0);
  CHECK(eta.back() == 1.0);
  CHECK(eta[10] == 0.0);
  CHECK(eta[1] == -(1.0 - g.epsilon));
  for (std::size_t j = 0; j < 21; ++j) CHECK(eta[j] == -eta[20 - j]);
  g.nodes = 20;
  CHECK_THROWS_AS(grid_nodes(g), InvalidInput);
  g.nodes = 11;
  CHECK_THROWS_AS(grid_nodes(g), InvalidInput);
}

TEST_CASE("oblate generating table: routes, parity, consistency") {
  const auto& t = oblate_table();
  CHECK(t.max_discrepancy < 1e-8);
  CHECK(t.parity_defect_F() < 1e-9);
  CHECK(t.parity_defect_f() < 1e-8);
  CHECK(t.consistency_defect() < 1e-9);
  CHECK(t.F[t.center()] == t.M);
  CHECK(t.method[t.center()] == NodeMethod::analytic);
  CHECK(t.method[1] == NodeMethod::ode);
  CHECK(t.method[0] == NodeMethod::area);
  // strict inside (-1, 1); at the ends F = L + Gamma-term = L here
  for (std::size_t j = 1; j + 1 < t.size(); ++j) CHECK(t.F[j] - t.L * std::abs(t.eta[j]) > 0.0);
  CHECK(t.F.back() == doctest::Approx(t.L).epsilon(1e-12));
  // T_quad(eta) = int tau = 2 int F - eta F
  for (std::size_t j = 1; j + 1 < t.size(); ++j) {
    CHECK(t.T_quad[j] == doctest::Approx(2 * t.int_F[j] - t.eta[j] * t.F[j]).epsilon(1e-9));
  }
  // int_0^1 F is odd-symmetric as a primitive
  CHECK(t.int_F[0] == doctest::Approx(-t.int_F_0_1).epsilon(1e-10));
}

TEST_CASE("tau' = -eta f' by finite differences") {
  const auto p = ellipsoid(1.0, 0.5);
  const double L = p.minimal_equator().L, h = 1e-4;
  for (double eta : {-0.6, 0.25, 0.8}) {
    const auto a = first_return(eta - h, p, 1e-12), b = first_return(eta + h, p, 1e-12);
    const double dtau = (b.tau - a.tau) / (2 * h);
    const double df = (f_from_winding(eta + h, b.W, L) - f_from_winding(eta - h, a.W, L)) / (2 * h);
    CHECK(dtau == doctest::Approx(-eta * df).epsilon(1e-5));
  }
}

TEST_CASE("F scales linearly with the surface") {
  const auto p = ellipsoid(1.0, 0.5);
  const auto q = p.scaled(2.5);
  for (double eta : {-0.7, 0.1, 0.55, 1.0}) {
    CHECK(F_area(eta, q) == doctest::Approx(2.5 * F_area(eta, p)).epsilon(1e-10));
  }
  const auto fr = first_return(0.4, p), gr = first_return(0.4, q);
  CHECK(gr.tau == doctest::Approx(2.5 * fr.tau).epsilon(1e-9));
  CHECK(gr.W == doctest::Approx(fr.W).epsilon(1e-9));
}

TEST_CASE("cross-check failure is reported") {
  GridSpec g = small_grid();
  g.crosscheck_tol = 1e-300;
  CHECK_THROWS_AS(build_generating_table(ellipsoid(1.0, 0.5), g), NumericalFailure);
}
