#include "systolic/return_map.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "systolic/error.hpp"
#include "systolic/geodesic_flow.hpp"
#include "systolic/parallel.hpp"
#include "systolic/quadrature.hpp"

namespace systolic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt2(const char* f, double a, double b) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

}  // namespace

const char* to_string(NodeMethod m) {
  switch (m) {
    case NodeMethod::ode:
      return "ode";
    case NodeMethod::area:
      return "area";
    case NodeMethod::analytic:
      return "analytic";
  }
  return "?";
}

FirstReturn first_return(double eta, const Profile& p, double tol) {
  if (!(eta > -1.0 && eta < 1.0)) throw InvalidInput("first_return: eta must lie in (-1, 1)");
  if (eta == 0.0) return {p.M(), 2 * kPi, 1.0};
  const double s0 = p.minimal_equator().s0;
  const UnitTangentState start{0.0, std::acos(-eta), s0};
  const double horizon = 200.0 * p.M();
  auto hit = first_upward_crossing(start, p, NavigationParams{0.0}, s0, horizon, tol);
  if (!hit) {
    throw NumericalFailure(fmt2("first return not found for eta = %.17g within flow time %.6g", eta,
                                horizon));
  }
  FirstReturn out;
  out.tau = hit->t;
  out.theta_advance = hit->state.theta;
  out.W = out.theta_advance / (2 * kPi);
  return out;
}

double f_from_winding(double eta, double W, double L) {
  if (eta > 0.0) return L * W + L;
  if (eta < 0.0) return L * W - L;
  return 0.0;
}

namespace {

// Integral over {s : r(s) > kappa} of g(r(s)) ds, where g vanishes like a
// square root where r = kappa. The set is split at its roots and at every
// equator; each piece gets the square-root substitution at both ends.
template <class G>
double superlevel_integral(const Profile& p, double kappa, G&& g, double tol) {
  const auto& grid = p.sample_grid();
  auto h = [&](double s) { return p.r(s) - kappa; };
  auto root = [&](double lo, double hi) {
    // h(lo) and h(hi) on opposite sides of zero (or one of them zero)
    double hlo = h(lo);
    if (hlo == 0.0) return lo;
    if (h(hi) == 0.0) return hi;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double hx = h(x);
      if (hx == 0.0) return x;
      if ((hx > 0) == (hlo > 0)) {
        lo = x;
        hlo = hx;
      } else {
        hi = x;
      }
      const double d = p.dr(x);
      double nx = d != 0.0 ? x - hx / d : 0.5 * (lo + hi);
      if (!(nx > std::min(lo, hi) && nx < std::max(lo, hi))) nx = 0.5 * (lo + hi);
      if (std::abs(nx - x) <= 2e-16 * std::max(1.0, std::abs(x))) return nx;
      x = nx;
    }
    return x;
  };

  std::vector<std::pair<double, double>> bands;
  double start = 0.0;
  bool inside = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool pos = h(grid[i]) > 0.0;
    if (pos && !inside) {
      start = (i == 0) ? grid[0] : root(grid[i - 1], grid[i]);
      inside = true;
    } else if (!pos && inside) {
      bands.emplace_back(start, root(grid[i - 1], grid[i]));
      inside = false;
    }
  }
  if (inside) bands.emplace_back(start, grid.back());

  double total = 0.0;
  for (auto [a, b] : bands) {
    std::vector<double> cuts{a};
    for (const auto& e : p.equators()) {
      if (e.s_c > a && e.s_c < b) cuts.push_back(e.s_c);
    }
    cuts.push_back(b);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      auto r = quad::sqrt_endpoints(
          [&](double s) {
            const double rs = p.r(s);
            return rs > kappa ? g(rs) : 0.0;
          },
          cuts[k], cuts[k + 1], tol, 0.0);
      if (!r.converged) {
        throw NumericalFailure(fmt2("area quadrature did not converge on [%.10g, %.10g]", cuts[k],
                                    cuts[k + 1]));
      }
      total += r.value;
    }
  }
  return total;
}

}  // namespace

double F_area(double eta, const Profile& p, double tol) {
  if (!(eta >= -1.0 && eta <= 1.0)) throw InvalidInput("F_area: eta must lie in [-1, 1]");
  const MinimalEquator me = p.minimal_equator();
  const double kappa = me.r_min * std::abs(eta);
  if (kappa == 0.0) return p.M();
  const double k2 = kappa * kappa;
  const double I = superlevel_integral(
      p, kappa, [k2](double r) { return 2.0 * std::sqrt(std::max(0.0, 1.0 - k2 / (r * r))); }, tol);
  return me.L * std::abs(eta) + I;
}

GammaIntegrals gamma_integrals(const Profile& p, double tol) {
  const double rm = p.minimal_equator().r_min;
  const double k2 = rm * rm;
  GammaIntegrals out;
  out.cos_part = superlevel_integral(
      p, rm, [k2](double r) { return 2.0 * std::sqrt(std::max(0.0, 1.0 - k2 / (r * r))); }, tol);
  out.r_part = superlevel_integral(
      p, rm, [rm](double r) { return 2.0 * r * std::acos(std::min(1.0, rm / r)); }, tol);
  return out;
}

std::vector<double> grid_nodes(const GridSpec& spec) {
  if (spec.nodes < 21 || spec.nodes % 2 == 0) {
    throw InvalidInput("grid: node count must be odd and at least 21");
  }
  if (!(spec.epsilon > 0.0 && spec.epsilon < 0.5)) throw InvalidInput("grid: epsilon must lie in (0, 0.5)");
  const std::size_t n = spec.nodes;
  std::vector<double> eta(n);
  eta.front() = -1.0;
  eta.back() = 1.0;
  const double e = 1.0 - spec.epsilon;
  const std::size_t m = n - 3;  // interior panels
  const std::size_t c = n / 2;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    // symmetric construction so that eta[c + k] = -eta[c - k] exactly
    const double k = static_cast<double>(static_cast<long>(j) - static_cast<long>(c));
    eta[j] = e * (2.0 * k / static_cast<double>(m));
  }
  return eta;
}

double GeneratingTable::parity_defect_F() const {
  double d = 0;
  for (std::size_t j = 0; j < size(); ++j) d = std::max(d, std::abs(F[j] - F[size() - 1 - j]));
  return d;
}

double GeneratingTable::parity_defect_f() const {
  double d = 0;
  for (std::size_t j = 1; j + 1 < size(); ++j) d = std::max(d, std::abs(f[j] + f[size() - 1 - j]));
  return d;
}

double GeneratingTable::consistency_defect() const {
  double d = 0;
  for (std::size_t j = 1; j + 1 < size(); ++j) {
    d = std::max(d, std::abs(tau[j] - (F[j] - eta[j] * f[j])));
  }
  return d;
}

GeneratingTable build_generating_table(const Profile& p, const GridSpec& spec) {
  GeneratingTable t;
  t.spec = spec;
  t.eta = grid_nodes(spec);
  const std::size_t n = t.eta.size();
  const std::size_t c = n / 2;
  const MinimalEquator me = p.minimal_equator();
  t.L = me.L;
  t.M = p.M();
  t.r_min = me.r_min;
  t.s0 = me.s0;
  t.r_max = p.r_max();

  t.F.assign(n, kNaN);
  t.f.assign(n, kNaN);
  t.tau.assign(n, kNaN);
  t.W.assign(n, kNaN);
  t.F_area.assign(n, kNaN);
  t.T_quad.assign(n, kNaN);
  t.int_F.assign(n, kNaN);
  t.method.assign(n, NodeMethod::ode);
  t.method.front() = t.method.back() = NodeMethod::area;
  t.method[c] = NodeMethod::analytic;

  const double itol = spec.integrator_tol;
  // Nodes: first return data and the area route.
  parallel_for(
      n,
      [&](std::size_t j) {
        t.F_area[j] = F_area(t.eta[j], p, spec.area_tol);
        if (j == 0 || j + 1 == n) return;
        const FirstReturn fr = first_return(t.eta[j], p, itol);
        t.tau[j] = fr.tau;
        t.W[j] = fr.W;
        t.f[j] = f_from_winding(t.eta[j], fr.W, t.L);
      },
      spec.threads);

  // Interior panels [eta_j, eta_{j+1}], j = 1 .. n-3: integrals of f, tau and
  // (eta_{j+1} - eta) f, the last giving the exact panel integral of F.
  using V = std::array<double, 3>;
  std::vector<V> panel(n, V{0, 0, 0});
  const double ptol = spec.quad_tol * std::max(1.0, t.L);
  parallel_for(
      n - 3,
      [&](std::size_t q) {
        const std::size_t j = q + 1;
        const double a = t.eta[j], b = t.eta[j + 1];
        auto res = quad::adaptive<V>(
            [&](double e) {
              const FirstReturn fr = first_return(e, p, itol);
              const double fv = f_from_winding(e, fr.W, t.L);
              return V{fv, fr.tau, (b - e) * fv};
            },
            a, b, ptol, 0.0, 200);
        if (!res.converged) {
          throw NumericalFailure(fmt2("panel quadrature of F' did not converge on [%.6g, %.6g]", a, b));
        }
        panel[j] = res.value;
      },
      spec.threads);

  // Accumulate outward from eta = 0 where F = M.
  t.F[c] = t.M;
  t.T_quad[c] = 0.0;
  t.int_F[c] = 0.0;
  t.tau[c] = t.M;
  t.W[c] = 1.0;
  t.f[c] = 0.0;
  for (std::size_t j = c; j + 2 < n; ++j) {
    const V& v = panel[j];
    const double h = t.eta[j + 1] - t.eta[j];
    t.F[j + 1] = t.F[j] + v[0];
    t.T_quad[j + 1] = t.T_quad[j] + v[1];
    t.int_F[j + 1] = t.int_F[j] + h * t.F[j] + v[2];
  }
  for (std::size_t j = c; j-- > 1;) {
    const V& v = panel[j];
    const double h = t.eta[j + 1] - t.eta[j];
    t.F[j] = t.F[j + 1] - v[0];
    t.T_quad[j] = t.T_quad[j + 1] - v[1];
    t.int_F[j] = t.int_F[j + 1] - (h * t.F[j] + v[2]);
  }

  // Endpoints from the Gamma integrals; the clamped end panels via the area route.
  t.gamma = gamma_integrals(p, spec.area_tol);
  t.F_end = t.L + t.gamma.cos_part;
  t.F.front() = t.F.back() = t.F_end;
  auto end_panel = [&](double a, double b) {
    auto r = quad::adaptive([&](double e) { return F_area(e, p, spec.area_tol); }, a, b,
                            1e-12 * std::max(1.0, t.L), 0.0, 200);
    return r.value;
  };
  t.int_F[n - 1] = t.int_F[n - 2] + end_panel(t.eta[n - 2], 1.0);
  t.int_F[0] = t.int_F[1] - end_panel(-1.0, t.eta[1]);
  t.int_F_0_1 = t.int_F[n - 1];

  t.max_discrepancy = 0.0;
  t.worst_node = c;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = std::abs(t.F[j] - t.F_area[j]);
    if (d > t.max_discrepancy) {
      t.max_discrepancy = d;
      t.worst_node = j;
    }
  }
  if (spec.enforce_crosscheck && !(t.max_discrepancy <= spec.crosscheck_tol)) {
    throw NumericalFailure(fmt2("generating function cross-check failed: |F_flow - F_area| = %.3g "
                                "at eta = %.6g",
                                t.max_discrepancy, t.eta[t.worst_node]));
  }
  return t;
}

}  // namespace systolic
