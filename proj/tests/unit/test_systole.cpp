#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "systolic/systole.hpp"

using namespace systolic;
constexpr double pi = std::numbers::pi;

namespace {

ReportOptions opts(std::size_t nodes = 101) {
  ReportOptions o;
  o.grid.nodes = nodes;
  return o;
}

bool required_entries_hold(const AnalysisReport& r) {
  for (const auto& e : r.ledger) {
    if (e.applicable && e.required && !e.holds) {
      MESSAGE("ledger entry failed: " << e.name << " " << e.lhs << " " << e.relation << " " << e.rhs);
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("round sphere without wind") {
  const auto r = systolic_report(Profile::round(1.0), {0.0}, opts(61));
  CHECK(r.rho_bh == doctest::Approx(pi).epsilon(1e-10));
  CHECK(r.rho_ht == doctest::Approx(pi).epsilon(1e-10));
  CHECK(r.zoll.verdict == ZollVerdict::zoll);
  CHECK(r.zoll.curvature_rel_error < 1e-12);
  CHECK(r.certified_branch == "zoll_equality");
  CHECK(r.fixed.continuum);
  bool eq = false, mer = false;
  for (const auto& g : r.geodesics) {
    if (g.source == GeodesicSource::equator_with_wind) eq = std::abs(g.length - 2 * pi) < 1e-12;
    if (g.source == GeodesicSource::meridian) mer = std::abs(g.length - 2 * pi) < 1e-12;
    CHECK(g.source != GeodesicSource::annulus_fixed_point);
  }
  CHECK(eq);
  CHECK(mer);
  CHECK(required_entries_hold(r));
}

TEST_CASE("round sphere equators with strong wind") {
  const auto p = Profile::round(1.0);
  const auto t = build_generating_table(p, opts(61).grid);
  const auto recs = closed_geodesics(p, {0.5}, build_finsler_table(t, 0.5));
  REQUIRE(recs.size() == 2);  // no meridians, no annulus fixed points
  CHECK(recs[0].source == GeodesicSource::equator_with_wind);
  CHECK(recs[0].length == doctest::Approx(4 * pi / 3).epsilon(1e-14));
  CHECK(recs[1].length == doctest::Approx(4 * pi).epsilon(1e-14));
  // integrate against the wind until theta has gone once around
  const auto e = integrate({0.0, pi, pi / 2}, p, {0.5}, 4 * pi).end();
  CHECK(e.theta == doctest::Approx(-2 * pi).epsilon(1e-9));
}

TEST_CASE("zoll verdicts") {
  const auto ob = ellipsoid(1.0, 0.5);
  GridSpec g;
  g.nodes = 41;
  const auto t = build_generating_table(ob, g);
  const auto z = zoll_check(ob, t);
  CHECK(z.verdict == ZollVerdict::not_zoll);
  CHECK(z.max_dev > 1.0);

  const auto rp = Profile::round(1.0);
  auto rt = build_generating_table(rp, g);
  CHECK(zoll_check(rp, rt).verdict == ZollVerdict::zoll);
  rt.max_discrepancy = 1e-3;  // noise above the tolerance: cannot decide
  CHECK(zoll_check(rp, rt).verdict == ZollVerdict::inconclusive);

  const auto dz = darboux_zoll(ZPlus::bump(1.0, -0.1, 0.6));
  const auto zz = zoll_check(dz, build_generating_table(dz, g));
  CHECK(zz.verdict == ZollVerdict::zoll);
  CHECK(zz.unique_equator);
  CHECK(zz.nondegenerate_max);
  CHECK(zz.curvature_ok);
}

TEST_CASE("oblate ellipsoid: ratio chains with and without wind") {
  const auto p = ellipsoid(1.0, 0.5);
  const auto r0 = systolic_report(p, {0.0}, opts());
  CHECK(r0.rho_bh < pi);
  CHECK(r0.geodesics[r0.shortest].source == GeodesicSource::meridian);
  CHECK(r0.certified_branch == "generating_function_minimum");
  CHECK(required_entries_hold(r0));

  for (double a : {0.2, 0.4}) {
    const auto r = systolic_report(p, {a}, opts());
    CHECK(r.rho_ht < r.rho_bh);
    CHECK(r.rho_bh < pi);
    CHECK(r.volumes.ht_area > r.volumes.bh_area);
    CHECK(required_entries_hold(r));
    REQUIRE(r.prop1);
    CHECK(r.certified_branch != "none");
  }
}

TEST_CASE("systolic ratios are scale invariant") {
  const auto p = ellipsoid(1.0, 0.5);
  const auto r1 = systolic_report(p, {0.3}, opts(61));
  const auto r2 = systolic_report(p.scaled(2.0), {0.15}, opts(61));
  CHECK(r2.rho_bh == doctest::Approx(r1.rho_bh).epsilon(1e-8));
  CHECK(r2.rho_ht == doctest::Approx(r1.rho_ht).epsilon(1e-8));
}

TEST_CASE("dumbbell: waist equator is shortest, Gamma term shows in the volume gap") {
  const auto p = dumbbell(1.0, 1.0);
  const auto r = systolic_report(p, {0.0}, opts(61));
  CHECK(r.geodesics[r.shortest].source == GeodesicSource::equator_with_wind);
  CHECK(r.ell_min_upper_bound == doctest::Approx(p.minimal_equator().L).epsilon(1e-12));
  CHECK(r.rho_bh < pi);
  const auto& g = r.table.gamma;
  const double gap = r.volumes.contact_volume_direct_a0 - annulus_volume(r.table);
  CHECK(gap > 0.5);
  CHECK(gap == doctest::Approx(4 * pi * g.r_part - 2 * r.table.L * g.cos_part).epsilon(1e-8));
  CHECK(required_entries_hold(r));
}
