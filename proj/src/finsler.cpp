#include "systolic/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "systolic/error.hpp"

namespace systolic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// f_a(eta) = f + a r_min tau from a fresh first return.
double fa_prime_at(double eta, const Profile& p, const GeneratingTable& t, double a, double tol) {
  const FirstReturn fr = first_return(eta, p, tol);
  return f_from_winding(eta, fr.W, t.L) + a * t.r_min * fr.tau;
}

// Root of h on [lo, hi] with h(lo), h(hi) of opposite signs.
template <class H>
double bisect(H&& h, double lo, double hi, double hlo) {
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (hm == 0.0) return mid;
    if ((hm > 0) == (hlo > 0)) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(Prop1Outcome o) {
  return o == Prop1Outcome::found ? "found" : "hypothesis_failed";
}

FinslerTable build_finsler_table(const GeneratingTable& t, double a, double t_tol) {
  if (!(std::abs(a) * t.r_max < 1.0)) {
    throw InvalidInput(fmt("wind too strong: |a| r_max = %.6g, need < 1", std::abs(a) * t.r_max));
  }
  FinslerTable ft;
  ft.base = t;
  ft.a = a;
  const std::size_t n = t.size();
  const double ar = a * t.r_min;
  ft.T.resize(n);
  ft.Fa.resize(n);
  ft.Fa_prime.assign(n, kNaN);
  std::size_t worst = 0;
  for (std::size_t j = 0; j < n; ++j) {
    ft.T[j] = 2.0 * t.int_F[j] - t.eta[j] * t.F[j];
    ft.Fa[j] = t.F[j] + ar * ft.T[j];
    if (j == 0 || j + 1 == n) continue;
    ft.Fa_prime[j] = t.f[j] + ar * t.tau[j];
    const double d = std::abs(t.T_quad[j] - ft.T[j]);
    if (d > ft.max_T_disagreement) {
      ft.max_T_disagreement = d;
      worst = j;
    }
  }
  if (!(ft.max_T_disagreement < t_tol)) {
    throw NumericalFailure(fmt("T routes disagree: |T_quad - T_closed| = %.3g at eta = %.6g",
                               ft.max_T_disagreement, t.eta[worst]));
  }
  const double F1 = t.F_end, I = t.int_F_0_1;
  ft.Fa_plus = (1.0 - ar) * F1 + 2.0 * ar * I;
  ft.Fa_minus = (1.0 + ar) * F1 - 2.0 * ar * I;
  return ft;
}

FixedPointSet fixed_points(const FinslerTable& ft, const Profile& p, double tol) {
  const GeneratingTable& t = ft.base;
  const std::size_t n = t.size();
  const double L = t.L;
  FixedPointSet out;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    lo = std::min(lo, ft.Fa_prime[j]);
    hi = std::max(hi, ft.Fa_prime[j]);
    sum += ft.Fa_prime[j];
  }
  out.shift_spread = hi - lo;
  if (out.shift_spread <= 1e-7 * L) {
    out.constant_shift = true;
    out.shift = sum / static_cast<double>(n - 2);
    const double k = out.shift / L;
    out.continuum = std::abs(k - std::round(k)) <= 1e-7;
    return out;
  }

  for (long k = static_cast<long>(std::ceil(lo / L)); k <= static_cast<long>(std::floor(hi / L));
       ++k) {
    auto h = [&](double e) { return fa_prime_at(e, p, t, ft.a, tol) - L * static_cast<double>(k); };
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double gj = ft.Fa_prime[j] - L * static_cast<double>(k);
      if (gj == 0.0) {
        out.points.push_back({t.eta[j], k, t.tau[j], true});
        continue;
      }
      if (j + 2 >= n) break;
      const double gn = ft.Fa_prime[j + 1] - L * static_cast<double>(k);
      if (gj * gn < 0.0) {
        const double e = bisect(h, t.eta[j], t.eta[j + 1], gj);
        out.points.push_back({e, k, first_return(e, p, tol).tau, false});
      }
    }
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const FixedPoint& x, const FixedPoint& y) { return x.eta < y.eta; });
  return out;
}

std::pair<double, double> minimize_F(const GeneratingTable& t, const Profile& p, double lo,
                                     double hi) {
  const std::size_t n = t.size();
  // Scan outward from the node nearest 0 so that ties resolve toward 0.
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < n; ++j) {
    if (t.eta[j] >= lo && t.eta[j] <= hi) order.push_back(j);
  }
  if (order.empty()) throw InvalidInput("minimize_F: empty interval");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(t.eta[x]) < std::abs(t.eta[y]);
  });
  const double slack = 1e-13 * t.L;
  std::size_t best = order.front();
  for (std::size_t j : order) {
    if (t.F_area[j] < t.F_area[best] - slack) best = j;
  }
  double a = best > 0 ? std::max(lo, t.eta[best - 1]) : t.eta[best];
  double b = best + 1 < n ? std::min(hi, t.eta[best + 1]) : t.eta[best];

  auto F = [&](double e) { return F_area(e, p, t.spec.area_tol); };
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = F(x1), f2 = F(x2);
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = F(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = F(x2);
    }
  }
  double eta = f1 < f2 ? x1 : x2;
  double val = std::min(f1, f2);
  // The node itself wins ties (it is at least as close to 0 as the bracket
  // interior when the minimum sits on a flat stretch or at the boundary).
  if (t.F_area[best] <= val + slack) {
    eta = t.eta[best];
    val = t.F_area[best];
  }
  return {eta, val};
}

Prop1Result prop1_search(const FinslerTable& ft_in, const Profile& p, double tol) {
  if (ft_in.a == 0.0) throw InvalidInput("prop1_search: needs a != 0");
  if (ft_in.a < 0.0) {
    // F_{-a}(eta) = F_a(-eta): search the conjugate flow.
    Prop1Result r = prop1_search(build_finsler_table(ft_in.base, -ft_in.a), p, tol);
    r.mirrored = true;
    return r;
  }
  const FinslerTable& ft = ft_in;
  const GeneratingTable& t = ft.base;
  const double a = ft.a, ar = a * t.r_min, L = t.L;

  Prop1Result r;
  r.a = a;
  r.int_F = t.int_F_0_1;
  r.bound = 0.5 * L * (1.0 + 1.0 / ((1.0 + ar) * (1.0 + ar)));
  r.ell0 = L / (1.0 + ar);
  if (r.int_F > r.bound) {
    r.outcome = Prop1Outcome::hypothesis_failed;
    return r;
  }
  r.outcome = Prop1Outcome::found;

  std::tie(r.eta_bar, r.F_bar) = minimize_F(t, p, -1.0, 0.0);
  if (r.eta_bar == 0.0) {
    r.Fa_prime_bar = ar * t.M;
  } else {
    r.Fa_prime_bar = fa_prime_at(r.eta_bar, p, t, a, tol);
  }

  // Largest sign change of F_a' below eta_bar, walking down from eta_bar.
  const std::size_t n = t.size();
  double up_eta = r.eta_bar, up_val = r.Fa_prime_bar;
  bool bracketed = false;
  double lo = 0, hi = 0, hlo = 0;
  for (std::size_t j = n - 2; j >= 1; --j) {
    if (!(t.eta[j] < r.eta_bar)) continue;
    const double v = ft.Fa_prime[j];
    if (v == 0.0) {
      r.eta_hat = t.eta[j];
      bracketed = true;
      lo = hi = t.eta[j];
      break;
    }
    if ((v > 0.0) != (up_val > 0.0)) {
      lo = t.eta[j];
      hi = up_eta;
      hlo = v;
      bracketed = true;
      break;
    }
    up_eta = t.eta[j];
    up_val = v;
  }
  if (!bracketed) {
    throw NumericalFailure(
        fmt("prop1: hypothesis holds (int F = %.10g <= %.10g) but F_a' has no sign change in "
            "[-1 + epsilon, eta_bar); the critical point lies in the clamped margin",
            r.int_F, r.bound));
  }
  if (lo != hi) {
    r.eta_hat = bisect([&](double e) { return fa_prime_at(e, p, t, a, tol); }, lo, hi, hlo);
  }
  r.tau_hat = first_return(r.eta_hat, p, tol).tau;
  r.g_hat = F_area(r.eta_hat, p, t.spec.area_tol) / (1.0 - ar * r.eta_hat);

  double prev = r.g_hat;
  r.g_increasing = true;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (t.eta[j] <= r.eta_hat || t.eta[j] > r.eta_bar) continue;
    const double g = t.F_area[j] / (1.0 - ar * t.eta[j]);
    if (!(g > prev)) r.g_increasing = false;
    prev = g;
  }
  if (!(r.F_bar / (1.0 - ar * r.eta_bar) >= prev)) r.g_increasing = false;
  r.conclusion_holds = r.tau_hat < r.F_bar && r.F_bar < r.ell0;
  return r;
}

}  // namespace systolic
