// One line per acceptance criterion: PASS/FAIL, the criterion, and the
// numbers it was decided on. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "systolic/systole.hpp"

using namespace systolic;
constexpr double pi = std::numbers::pi;

namespace {

struct Case {
  std::string name;
  Profile p;
  GeneratingTable t;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("%s [%2d] %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs a criterion, turning an exception into a failure line.
void criterion(int id, const char* title, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
    ok = false;
  }
  report(id, title, ok, detail);
}

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

GridSpec acceptance_grid() {
  GridSpec g;
  g.nodes = 201;
  g.enforce_crosscheck = false;  // criterion 2 checks it explicitly
  return g;
}

// The flow time after which the equator orbit through s_c with direction beta
// has turned once around the axis, found on the integrated trajectory.
double equator_period(const Profile& p, double s_c, double beta, double a, double guess) {
  const Trajectory tr = integrate({0.0, beta, s_c}, p, {a}, 1.5 * guess, 1e-12);
  const double target = beta == 0.0 ? 2 * pi : -2 * pi;
  double lo = 0.0, hi = 1.5 * guess;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(tr.at(mid).theta) < std::abs(target)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Area of the ellipse (1 - a^2) x^2 + y^2 + 2 a x <= 1 from its radial
// function, by the periodic trapezoid rule.
double ellipse_area_oracle(double a) {
  const int n = 20000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(2 * pi * i / n);
    const double q = 1 - a * a * c * c;
    const double rho = (-a * c + std::sqrt(a * a * c * c + q)) / q;
    sum += 0.5 * rho * rho;
  }
  return sum * 2 * pi / n;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t_all = clock::now();

  const Profile round = Profile::round(1.0);
  const Profile spiky = spiked(1.0, 3.0, 0.05, 0.03, 0.5);

  // 1. Round sphere, a = 0
  criterion(1, "round sphere R=1, a=0", [&](std::string& d) {
    const auto t0 = clock::now();
    const double area = riemannian_area(round);
    const double vol = contact_volume_direct(round, {0.0});
    ReportOptions o;
    o.grid = acceptance_grid();
    const AnalysisReport R = systolic_report(round, {0.0}, o);
    double dev = 0;
    for (double F : R.table.F) dev = std::max(dev, std::abs(F - 2 * pi));
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    d = fmt("area rel err %.2e, volume rel err %.2e, max|F-2pi| %.2e over %zu nodes, rho_BH rel err "
            "%.2e, %.2f s",
            rel(area, 4 * pi), rel(vol, 8 * pi * pi), dev, R.table.size(), rel(R.rho_bh, pi), secs);
    return rel(area, 4 * pi) < 1e-10 && rel(vol, 8 * pi * pi) < 1e-8 && dev < 1e-6 &&
           R.table.size() == 201 && rel(R.rho_bh, pi) < 1e-8 && secs < 30.0;
  });

  // Tables shared by criteria 2 to 4.
  std::vector<Case> cases;
  {
    std::vector<std::pair<std::string, Profile>> ps = {
        {"round", round},
        {"oblate c=0.5", ellipsoid(1.0, 0.5)},
        {"prolate c=2", ellipsoid(1.0, 2.0)},
        {"spiked", spiky},
        {"darboux_zoll", darboux_zoll(ZPlus::bump(1.0, -0.1, 0.6))},
        {"dumbbell", dumbbell(1.0, 1.0)},
    };
    for (auto& [name, p] : ps) cases.push_back({name, p, build_generating_table(p, acceptance_grid())});
  }

  // 2. Dual-oracle F
  criterion(2, "dual-route F agreement < 1e-5", [&](std::string& d) {
    bool ok = true;
    for (const auto& c : cases) {
      double worst = 0;
      for (std::size_t j = 0; j < c.t.size(); ++j) {
        worst = std::max(worst, std::abs(c.t.F[j] - F_area(c.t.eta[j], c.p)));
      }
      d += fmt("%s %.1e; ", c.name.c_str(), worst);
      ok = ok && worst < 1e-5;
    }
    return ok;
  });

  // 3. Volume identity
  criterion(3, "contact volume via F vs direct (rel < 1e-4)", [&](std::string& d) {
    bool ok = true;
    for (const auto& c : cases) {
      const double direct = contact_volume_direct(c.p, {0.0});
      const double via = contact_volume_via_F(c.p, c.t);
      d += fmt("%s %.1e; ", c.name.c_str(), rel(via, direct));
      ok = ok && rel(via, direct) < 1e-4;
    }
    return ok;
  });

  // 4. Lower bound on F and the tau = F - eta f consistency
  criterion(4, "F > L|eta| and |tau - (F - eta f)| < 1e-6", [&](std::string& d) {
    bool ok = true;
    for (const auto& c : cases) {
      const auto& t = c.t;
      double margin = INFINITY, cons = 0;
      for (std::size_t j = 1; j + 1 < t.size(); ++j) {
        margin = std::min(margin, t.F[j] - t.L * std::abs(t.eta[j]));
        cons = std::max(cons, std::abs(t.tau[j] - (t.F[j] - t.eta[j] * t.f[j])));
      }
      // eta = +-1: the bound is the non-strict F(+-1) = L + Gamma-term >= L
      const double end_margin = std::min(t.F.front(), t.F.back()) - t.L;
      d += fmt("%s min %.3g end %.1e cons %.1e; ", c.name.c_str(), margin, end_margin, cons);
      ok = ok && margin > 0 && end_margin >= -1e-9 * t.L && cons < 1e-6;
    }
    return ok;
  });

  // 5. Zoll certification of a Darboux sphere
  criterion(5, "darboux_zoll certified Zoll, curvature identity, rho_BH = pi", [&](std::string& d) {
    const Case& c = cases[4];
    const ZollReport z = zoll_check(c.p, c.t, 1e-3);
    ReportOptions o;
    o.grid = acceptance_grid();
    const AnalysisReport R = systolic_report(c.p, {0.0}, c.t, o);
    d = fmt("verdict %s, max|F-L|/L %.2e, r''(s0) r(s0) + 1 = %.2e, unique nondegenerate max %d, "
            "rho_BH rel err %.2e",
            to_string(z.verdict), z.max_dev / c.t.L, z.curvature_rel_error, z.nondegenerate_max,
            rel(R.rho_bh, pi));
    return z.verdict == ZollVerdict::zoll && z.max_dev < 1e-3 * c.t.L &&
           z.curvature_rel_error < 1e-3 && z.nondegenerate_max && rel(R.rho_bh, pi) < 1e-3;
  });

  // 6. Strict inequality, and the spiked sphere's short orbit
  criterion(6, "oblate and spiked rho_BH < pi; spiked minimum from an annulus fixed point",
            [&](std::string& d) {
              ReportOptions o;
              o.grid = acceptance_grid();
              const AnalysisReport ob = systolic_report(cases[1].p, {0.0}, cases[1].t, o);
              const AnalysisReport sp = systolic_report(spiky, {0.0}, cases[3].t, o);
              const auto& g = sp.geodesics[sp.shortest];
              d = fmt("oblate rho_BH %.6f; spiked rho_BH %.6f via %s (eta %.4f, length %.6f), "
                      "equator-only %.4f = %.3f pi",
                      ob.rho_bh, sp.rho_bh, to_string(g.source), g.eta, g.length,
                      sp.rho_bh_equator_only, sp.rho_bh_equator_only / pi);
              return ob.rho_bh < pi && sp.rho_bh < pi &&
                     g.source == GeodesicSource::annulus_fixed_point &&
                     sp.rho_bh_equator_only > 1.5 * pi;
            });

  // 7. Finsler chain for round and oblate
  criterion(7, "rho_HT < rho_BH < pi, HT > BH, equator lengths by integration", [&](std::string& d) {
    bool ok = true;
    ReportOptions o;
    o.grid = acceptance_grid();
    for (std::size_t k : {std::size_t{0}, std::size_t{1}}) {
      const Case& c = cases[k];
      for (double a : {0.2, 0.4 / c.p.r_max()}) {
        const AnalysisReport R = systolic_report(c.p, {a}, c.t, o);
        double eq_err = 0;
        for (const auto& g : R.geodesics) {
          if (g.source != GeodesicSource::equator_with_wind &&
              g.source != GeodesicSource::equator_against_wind) {
            continue;
          }
          const double beta = g.source == GeodesicSource::equator_with_wind ? 0.0 : pi;
          eq_err = std::max(eq_err, std::abs(equator_period(c.p, g.s_c, beta, a, g.length) - g.length));
        }
        const bool here = R.rho_ht < R.rho_bh && R.rho_bh < pi &&
                          R.volumes.ht_area > R.volumes.bh_area && eq_err < 1e-6;
        d += fmt("%s a=%.2f: rho_HT %.5f rho_BH %.5f HT-BH %.3g eq err %.1e; ", c.name.c_str(), a,
                 R.rho_ht, R.rho_bh, R.volumes.ht_area - R.volumes.bh_area, eq_err);
        ok = ok && here;
      }
    }
    return ok;
  });

  // 8. Clairaut conservation
  criterion(8, "Clairaut drift < 1e-7 on 100 random trajectories per profile", [&](std::string& d) {
    bool ok = true;
    std::mt19937_64 rng(20240601);
    for (const auto& c : cases) {
      const double half = c.p.half_length();
      std::uniform_real_distribution<double> S(0.01 * half, 0.99 * half), B(0.0, 2 * pi),
          A(-0.5, 0.5);
      double worst = 0;
      for (int i = 0; i < 100; ++i) {
        const double a = A(rng) / c.p.r_max();
        const Trajectory tr = integrate({0.0, B(rng), S(rng)}, c.p, {a}, 50.0, 1e-10);
        worst = std::max(worst, tr.max_clairaut_drift());
      }
      d += fmt("%s %.1e; ", c.name.c_str(), worst);
      ok = ok && worst < 1e-7;
    }
    return ok;
  });

  // 9. Return / no-return dichotomy on the dumbbell (the only test profile
  // with a band r > r_min away from the minimal equator)
  criterion(9, "|K| < r_min returns to the annulus, |K| > r_min never does", [&](std::string& d) {
    const Case& c = cases[5];
    const Profile& p = c.p;
    const MinimalEquator me = p.minimal_equator();
    const double horizon = 200.0 * p.M();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int back = 0, stay = 0;
    double slowest = 0;
    for (int i = 0; i < 50; ++i) {
      double s, r;
      do {
        s = p.half_length() * (0.02 + 0.96 * U(rng));
        r = p.r(s);
      } while (r < 0.05);
      const double k = std::min(r, me.r_min) * (0.001 + 0.989 * U(rng));
      const double beta = (U(rng) < 0.5 ? 1 : -1) * std::acos(k / r) + (U(rng) < 0.5 ? 0 : pi);
      const auto hit = first_upward_crossing({0.0, beta, s}, p, {0.0}, me.s0, horizon);
      if (hit) {
        ++back;
        slowest = std::max(slowest, hit->t);
      }
    }
    // |K| > r_min needs r(s) > r_min: sample inside the bulges
    std::vector<double> bulge;
    for (double s : p.sample_grid()) {
      if (p.r(s) > 1.05 * me.r_min) bulge.push_back(s);
    }
    for (int i = 0; i < 50; ++i) {
      const double s = bulge[static_cast<std::size_t>(U(rng) * bulge.size()) % bulge.size()];
      const double r = p.r(s);
      const double k = me.r_min * 1.01 + (0.999 * r - me.r_min * 1.01) * U(rng);
      const double beta = (U(rng) < 0.5 ? 1 : -1) * std::acos(k / r) + (U(rng) < 0.5 ? 0 : pi);
      if (!first_upward_crossing({0.0, beta, s}, p, {0.0}, me.s0, horizon)) ++stay;
    }
    d = fmt("returned %d/50 (slowest %.1f), stayed away %d/50, horizon %.0f", back, slowest, stay,
            horizon);
    return back == 50 && stay == 50;
  });

  // 10. prop1 search
  criterion(10, "prop1: round fails the hypothesis; oblate finds eta_bar, eta_hat", [&](std::string& d) {
    bool ok = true;
    const Case& rc = cases[0];
    for (double a : {0.05, 0.2, 0.5, 0.9}) {
      const auto r = prop1_search(build_finsler_table(rc.t, a), rc.p);
      ok = ok && r.outcome == Prop1Outcome::hypothesis_failed;
    }
    d = fmt("round: %s; ", ok ? "hypothesis_failed for a in {0.05,0.2,0.5,0.9}" : "unexpected outcome");

    const Case& oc = cases[1];
    const double a = 0.1;
    const FinslerTable ft = build_finsler_table(oc.t, a);
    const Prop1Result r = prop1_search(ft, oc.p);
    if (r.outcome != Prop1Outcome::found) {
      d += "oblate: hypothesis_failed";
      return false;
    }
    const double ar = a * oc.t.r_min;
    // brute-force minimization of F on (-1, 0]
    double best_eta = 0, best_F = INFINITY;
    const int N = 2000;
    for (int i = N; i >= 1; --i) {
      const double e = -static_cast<double>(N - i) / N;
      const double F = F_area(e, oc.p);
      if (F < best_F - 1e-13) {
        best_F = F;
        best_eta = e;
      }
    }
    // sign scan of F_a' = f + a r_min tau below eta_bar, from the top
    double scan_hi = r.eta_bar, v_hi = r.Fa_prime_bar, lo_br = NAN, hi_br = NAN;
    const int K = 400;
    for (int i = 1; i <= K; ++i) {
      const double e = r.eta_bar - (r.eta_bar - (-1.0 + oc.t.spec.epsilon)) * i / K;
      const auto fr = first_return(e, oc.p);
      const double v = f_from_winding(e, fr.W, oc.t.L) + ar * fr.tau;
      if ((v > 0) != (v_hi > 0)) {
        lo_br = e;
        hi_br = scan_hi;
        break;
      }
      scan_hi = e;
      v_hi = v;
    }
    const double step = 1.0 / N;
    const bool bar_ok = std::abs(r.eta_bar - best_eta) <= step && r.F_bar <= best_F + 1e-9;
    const bool hat_ok = r.eta_hat >= lo_br && r.eta_hat <= hi_br;
    const bool chain = r.tau_hat < r.F_bar && r.F_bar < oc.t.L / (1 + ar);
    d += fmt("oblate a=0.1: eta_bar %.6f (oracle %.6f), eta_hat %.6f in [%.6f, %.6f], "
             "tau_hat %.6f < F_bar %.6f < L/(1+ar) %.6f",
             r.eta_bar, best_eta, r.eta_hat, lo_br, hi_br, r.tau_hat, r.F_bar, oc.t.L / (1 + ar));
    return ok && bar_ok && hat_ok && chain && r.conclusion_holds;
  });

  // 11. Polar body area
  criterion(11, "translated disk polar area vs ellipse-area oracle (rel 1e-8)", [&](std::string& d) {
    bool ok = true;
    for (double a : {0.0, 0.3, 0.7, 0.9}) {
      const double e = rel(translated_disk_polar_area(a), ellipse_area_oracle(a));
      d += fmt("a=%.1f %.1e; ", a, e);
      ok = ok && e < 1e-8;
    }
    return ok;
  });

  std::printf("%d of 11 criteria failed, %.1f s\n", failures,
              std::chrono::duration<double>(clock::now() - t_all).count());
  return failures;
}
