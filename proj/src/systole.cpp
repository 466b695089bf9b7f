#include "systolic/systole.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "systolic/error.hpp"
#include "systolic/quadrature.hpp"

namespace systolic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LedgerEntry entry(std::string name, double lhs, std::string rel, double rhs, double rel_tol,
                  std::string note = {}) {
  LedgerEntry e;
  e.name = std::move(name);
  e.relation = std::move(rel);
  e.lhs = lhs;
  e.rhs = rhs;
  e.note = std::move(note);
  const double slack = rel_tol * std::max(std::abs(lhs), std::abs(rhs));
  if (e.relation == "<") e.holds = lhs < rhs;
  else if (e.relation == ">") e.holds = lhs > rhs;
  else if (e.relation == "<=") e.holds = lhs <= rhs + slack;
  else if (e.relation == ">=") e.holds = lhs >= rhs - slack;
  else e.holds = std::abs(lhs - rhs) <= slack;
  return e;
}

LedgerEntry not_applicable(std::string name, std::string rel, std::string note) {
  LedgerEntry e;
  e.name = std::move(name);
  e.relation = std::move(rel);
  e.lhs = e.rhs = kNaN;
  e.applicable = false;
  e.holds = false;
  e.note = std::move(note);
  return e;
}

}  // namespace

const char* to_string(GeodesicSource s) {
  switch (s) {
    case GeodesicSource::equator_with_wind:
      return "equator_with_wind";
    case GeodesicSource::equator_against_wind:
      return "equator_against_wind";
    case GeodesicSource::meridian:
      return "meridian";
    case GeodesicSource::annulus_fixed_point:
      return "annulus_fixed_point";
  }
  return "?";
}

const char* to_string(ZollVerdict v) {
  switch (v) {
    case ZollVerdict::zoll:
      return "zoll";
    case ZollVerdict::not_zoll:
      return "not_zoll";
    case ZollVerdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::vector<ClosedGeodesicRecord> closed_geodesics(const Profile& p, const NavigationParams& nav,
                                                   const FinslerTable& ft, FixedPointSet* fixed_out,
                                                   double tol) {
  validate_wind(p, nav);
  const double a = nav.a, aa = std::abs(a);
  std::vector<ClosedGeodesicRecord> out;
  for (const EquatorInfo& e : p.equators()) {
    ClosedGeodesicRecord w;
    w.source = GeodesicSource::equator_with_wind;
    w.eta = kNaN;
    w.s_c = e.s_c;
    w.a = a;
    w.length = 2 * kPi * e.radius / (1.0 + aa * e.radius);
    out.push_back(w);
    w.source = GeodesicSource::equator_against_wind;
    w.length = 2 * kPi * e.radius / (1.0 - aa * e.radius);
    out.push_back(w);
  }
  if (a == 0.0) {
    ClosedGeodesicRecord m;
    m.source = GeodesicSource::meridian;
    m.eta = kNaN;
    m.s_c = kNaN;
    m.length = p.M();
    out.push_back(m);
  }
  FixedPointSet fp = fixed_points(ft, p, tol);
  for (const FixedPoint& x : fp.points) {
    if (a == 0.0 && x.eta == 0.0) continue;
    ClosedGeodesicRecord r;
    r.source = GeodesicSource::annulus_fixed_point;
    r.eta = x.eta;
    r.s_c = kNaN;
    r.k = x.k;
    r.length = x.length;
    r.a = a;
    out.push_back(r);
  }
  if (fixed_out) *fixed_out = std::move(fp);
  return out;
}

ZollReport zoll_check(const Profile& p, const GeneratingTable& t, double tol_rel) {
  ZollReport z;
  z.tol = tol_rel * t.L;
  z.noise = t.max_discrepancy;
  for (std::size_t j = 0; j < t.size(); ++j) z.max_dev = std::max(z.max_dev, std::abs(t.F[j] - t.L));

  const double r0 = p.r(t.s0);
  z.curvature_rel_error = std::abs(p.d2r(t.s0) * r0 + 1.0);
  z.curvature_ok = z.curvature_rel_error <= 1e-3;
  const auto& eq = p.equators();
  z.unique_equator = eq.size() == 1;
  z.nondegenerate_max = z.unique_equator && eq.front().kind == EquatorKind::max;

  if (z.max_dev > z.tol && z.max_dev > 10.0 * z.noise) {
    z.verdict = ZollVerdict::not_zoll;
  } else if (z.max_dev <= z.tol && 10.0 * z.noise <= z.tol) {
    // A flat F with the wrong equator picture means the table is lying.
    z.verdict = (z.curvature_ok && z.nondegenerate_max) ? ZollVerdict::zoll
                                                        : ZollVerdict::inconclusive;
  } else {
    z.verdict = ZollVerdict::inconclusive;
  }
  return z;
}

AnalysisReport systolic_report(const Profile& p, const NavigationParams& nav,
                               const ReportOptions& opt) {
  validate_wind(p, nav);
  return systolic_report(p, nav, build_generating_table(p, opt.grid), opt);
}

AnalysisReport systolic_report(const Profile& p, const NavigationParams& nav,
                               const GeneratingTable& table, const ReportOptions& opt) {
  validate_wind(p, nav);
  AnalysisReport R;
  R.profile = p;
  R.a = nav.a;
  R.table = table;
  R.ftable = build_finsler_table(R.table, nav.a);
  R.volumes = volume_report(p, nav, R.table);
  R.geodesics = closed_geodesics(p, nav, R.ftable, &R.fixed, opt.tol);
  if (R.geodesics.empty()) throw NumericalFailure("no closed geodesic found");

  R.shortest = 0;
  double eq_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < R.geodesics.size(); ++i) {
    const auto& g = R.geodesics[i];
    if (g.length < R.geodesics[R.shortest].length) R.shortest = i;
    if (g.source == GeodesicSource::equator_with_wind) eq_min = std::min(eq_min, g.length);
  }
  const double ell = R.geodesics[R.shortest].length;
  R.ell_min_upper_bound = ell;
  R.rho_bh = ell * ell / R.volumes.bh_area;
  R.rho_ht = ell * ell / R.volumes.ht_area;
  R.rho_bh_equator_only = eq_min * eq_min / R.volumes.bh_area;
  R.zoll = zoll_check(p, R.table, opt.zoll_tol);
  std::tie(R.eta_mu, R.mu) = minimize_F(R.table, p, 0.0, 1.0);

  const GeneratingTable& t = R.table;
  const double L = t.L, mu = R.mu;
  const double vol = R.volumes.contact_volume_direct_a0;
  const bool zoll = R.zoll.verdict == ZollVerdict::zoll;
  auto& led = R.ledger;

  // Slack for (i): the F-integral carries the table's dual-route noise.
  const double vol_slack = std::max(1e-9, 4.0 * L * t.max_discrepancy / vol);
  led.push_back(entry("annulus_volume_bound", annulus_volume(t), "<=", vol, vol_slack,
                      "4 L int_0^1 F - 2 L^2 <= vol; the gap is the Gamma term"));
  led.push_back(entry("gamma_term_nonnegative", 0.0, "<=",
                      4 * kPi * t.gamma.r_part - 2 * L * t.gamma.cos_part, 1e-12));
  // Unsplit adaptive quadrature across the kink at mu / L.
  const double max_int =
      quad::adaptive([&](double e) { return std::max(mu, L * e); }, 0.0, 1.0, 1e-13 * L, 0.0, 4000)
          .value;
  if (mu <= L) {
    const double max_closed = mu + 0.5 * (L - mu) * (L - mu) / L;
    led.push_back(entry("max_integral_identity", max_int, "=", max_closed, 1e-10,
                        "int_0^1 max{mu, L eta} = mu + (L - mu)^2 / (2 L)"));
  } else {
    led.push_back(not_applicable("max_integral_identity", "=",
                                 "mu > L: the maximum is mu throughout"));
  }
  led.push_back(entry("int_F_vs_max_integral", t.int_F_0_1, ">=", max_int, 1e-10,
                      "F >= max{mu, L eta} on [0, 1]"));
  if (zoll) {
    led.push_back(entry("rho_bh_vs_pi", R.rho_bh, nav.a == 0.0 ? "=" : "<", kPi, 1e-3,
                        "Zoll: equality only at a = 0"));
  } else {
    led.push_back(entry("rho_bh_vs_pi", R.rho_bh, "<", kPi, 0.0));
  }

  if (nav.a == 0.0) {
    led.push_back(entry("closed_orbit_at_mu", ell, "<=", mu, 1e-9,
                        "some enumerated closed geodesic has length <= mu"));
    if (zoll) {
      led.push_back(entry("volume_vs_mu", 2 * mu * mu, "=", vol, 1e-4, "Zoll: equality"));
    } else {
      led.push_back(entry("volume_vs_mu", 2 * mu * mu, "<", vol, 0.0));
    }
    led.push_back(not_applicable("equator_branch", "<", "a = 0"));
    led.push_back(not_applicable("wind_rho_ht_lt_rho_bh", "<", "a = 0: rho_ht = rho_bh"));
    if (zoll) {
      R.certified_branch = "zoll_equality";
    } else if (2 * mu * mu < vol && ell <= mu * (1 + 1e-9)) {
      R.certified_branch = "generating_function_minimum";
    } else {
      R.certified_branch = "none";
    }
    return R;
  }

  const double ar = std::abs(nav.a) * t.r_min;
  const double ell0 = L / (1.0 + ar);
  auto eq_branch = entry("equator_branch", ell0 * ell0, "<", 0.5 * vol, 0.0,
                         "ell_0^2 < vol / 2 certifies rho_BH < pi by itself");
  eq_branch.required = false;
  led.push_back(eq_branch);
  led.push_back(entry("wind_rho_ht_lt_rho_bh", R.rho_ht, "<", R.rho_bh, 0.0));
  led.push_back(entry("wind_ht_area_gt_bh_area", R.volumes.ht_area, ">", R.volumes.bh_area, 0.0));

  R.prop1 = prop1_search(R.ftable, p, opt.tol);
  const Prop1Result& P = *R.prop1;
  led.push_back(entry("prop1_hypothesis", P.int_F, "<=", P.bound, 0.0,
                      "int_0^1 F <= (L/2)(1 + 1/(1 + a r_min)^2)"));
  led.back().required = false;
  if (P.outcome == Prop1Outcome::found) {
    led.push_back(entry("prop1_tau_hat_lt_F_bar", P.tau_hat, "<", P.F_bar, 0.0));
    led.push_back(entry("prop1_F_bar_lt_ell0", P.F_bar, "<", P.ell0, 0.0));
    led.push_back(entry("prop1_tau_hat_eq_g_hat", P.tau_hat, "=", P.g_hat, 1e-6));
    led.push_back(entry("prop1_tau_hat_sq_lt_half_vol", P.tau_hat * P.tau_hat, "<", 0.5 * vol, 0.0));
    led.back().required = false;
  } else {
    led.push_back(not_applicable("prop1_tau_hat_lt_F_bar", "<", "hypothesis failed"));
  }

  if (eq_branch.holds) {
    R.certified_branch = "equator";
  } else if (P.outcome == Prop1Outcome::found && P.conclusion_holds &&
             P.tau_hat * P.tau_hat < 0.5 * vol) {
    R.certified_branch = "prop1";
  } else {
    R.certified_branch = "none";
  }
  return R;
}

}  // namespace systolic
