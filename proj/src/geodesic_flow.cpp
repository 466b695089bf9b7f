#include "systolic/geodesic_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "systolic/error.hpp"

namespace systolic {

namespace {

ode::Options options_for(double tol) {
  ode::Options o;
  o.rtol = tol;
  o.atol = tol;
  return o;
}

}  // namespace

void validate_wind(const Profile& p, const NavigationParams& nav) {
  if (!std::isfinite(nav.a)) throw InvalidInput("wind a must be finite");
  if (!(std::abs(nav.a) * p.r_max() < 1.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "wind |a| = %.6g violates |a| < 1/r_max = %.6g", std::abs(nav.a),
                  1.0 / p.r_max());
    throw InvalidInput(buf);
  }
}

bool ReebRhs::operator()(double, const ode::State<3>& y, ode::State<3>& dy) const {
  const double s = y[2];
  if (!(s > 0.0 && s < profile->half_length())) return false;
  const ProfilePoint q = profile->eval(s);
  if (!(q.r > 0.0)) return false;
  const double cb = std::cos(y[1]);
  dy[0] = cb / q.r + a;
  dy[1] = q.dr * cb / q.r;
  dy[2] = std::sin(y[1]);
  return true;
}

ReebVector reeb_field(const UnitTangentState& u, const Profile& p, const NavigationParams& nav) {
  if (!(u.s > 0.0 && u.s < p.half_length())) {
    throw InvalidInput("reeb_field: s must lie strictly between the poles");
  }
  ode::State<3> dy;
  ReebRhs rhs{&p, nav.a};
  if (!rhs(0.0, {u.theta, u.beta, u.s}, dy)) throw InvalidInput("reeb_field: state at a pole");
  return {dy[0], dy[1], dy[2]};
}

double clairaut(const UnitTangentState& u, const Profile& p) {
  if (!(u.s > 0.0 && u.s < p.half_length())) return 0.0;
  return p.r(u.s) * std::cos(u.beta);
}

double finsler_norm(const Profile& p, const NavigationParams& nav, double s, double A, double B) {
  if (A == 0.0 && B == 0.0) throw InvalidInput("finsler_norm: zero vector");
  const double r = p.r(s);
  const double ar = nav.a * r;
  if (!(std::abs(ar) < 1.0)) throw InvalidInput("finsler_norm: |a| r(s) must be below 1");
  const double q = 1.0 - ar * ar;
  return (std::sqrt(r * r * A * A + q * B * B) - r * ar * A) / q;
}

// ---------------------------------------------------------------- trajectories

UnitTangentState Trajectory::at(double t) const {
  if (steps_.empty() || t <= 0.0) return start_;
  if (t >= t_end_) {
    const auto& y = steps_.back().y1;
    return {y[0], y[1], y[2]};
  }
  auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                             [](double x, const ode::DenseStep<3>& st) { return x < st.t0; });
  const auto& st = *(it - 1);
  const auto y = st.at(t);
  return {y[0], y[1], y[2]};
}

std::vector<Trajectory::Sample> Trajectory::sample(std::size_t n, const Profile& p) const {
  std::vector<Sample> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = (n == 0) ? 0.0 : t_end_ * static_cast<double>(i) / n;
    const UnitTangentState u = at(t);
    out.push_back({t, u.theta, u.beta, u.s, clairaut(u, p)});
  }
  return out;
}

Trajectory integrate(const UnitTangentState& u, const Profile& p, const NavigationParams& nav,
                     double t_end, double tol) {
  validate_wind(p, nav);
  if (!(t_end >= 0.0)) throw InvalidInput("integrate: t_end must be non-negative");
  if (!(u.s > 0.0 && u.s < p.half_length())) {
    throw InvalidInput("integrate: initial s must lie strictly between the poles");
  }
  Trajectory tr;
  tr.start_ = u;
  tr.t_end_ = t_end;
  tr.k0_ = clairaut(u, p);
  if (t_end == 0.0) return tr;
  ReebRhs rhs{&p, nav.a};
  ode::integrate<3>(rhs, 0.0, ode::State<3>{u.theta, u.beta, u.s}, t_end, options_for(tol),
                    [&](const ode::DenseStep<3>& st) {
                      tr.steps_.push_back(st);
                      const double k = p.r(st.y1[2]) * std::cos(st.y1[1]);
                      tr.drift_ = std::max(tr.drift_, std::abs(k - tr.k0_));
                      return true;
                    });
  return tr;
}

namespace {

// Upward zero of s(t) - target inside a step, polished with fresh RK5 steps
// from the step start.
Crossing polish_crossing(const ReebRhs& rhs, const ode::DenseStep<3>& st, double lo, double hi,
                         double target) {
  auto g = [&](double t) { return st.at(t)[2] - target; };
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double t = 0.5 * (lo + hi);
  ode::State<3> y = st.at(t);
  for (int it = 0; it < 4; ++it) {
    ode::State<3> fresh;
    if (!ode::single_step<3>(rhs, st.t0, st.y0, t - st.t0, fresh)) break;
    y = fresh;
    const double ds = std::sin(y[1]);
    if (!(ds > 0.0)) break;
    const double dt = -(y[2] - target) / ds;
    t += dt;
    if (std::abs(dt) <= 1e-15 * (1.0 + std::abs(t))) {
      ode::single_step<3>(rhs, st.t0, st.y0, t - st.t0, y);
      break;
    }
  }
  return {t, {y[0], y[1], y[2]}};
}

}  // namespace

std::optional<Crossing> first_upward_crossing(const UnitTangentState& u, const Profile& p,
                                              const NavigationParams& nav, double target,
                                              double horizon, double tol) {
  if (!(u.s > 0.0 && u.s < p.half_length())) {
    throw InvalidInput("first_upward_crossing: initial s must lie strictly between the poles");
  }
  ReebRhs rhs{&p, nav.a};
  std::optional<Crossing> found;
  ode::integrate<3>(rhs, 0.0, ode::State<3>{u.theta, u.beta, u.s}, horizon, options_for(tol),
                    [&](const ode::DenseStep<3>& st) {
                      constexpr int kSub = 5;
                      double t_prev = st.t0;
                      double g_prev = st.y0[2] - target;
                      for (int i = 1; i <= kSub; ++i) {
                        const double t = st.t0 + st.h * i / kSub;
                        const double gv = (i == kSub ? st.y1[2] : st.at(t)[2]) - target;
                        if (g_prev < 0.0 && gv >= 0.0) {
                          found = polish_crossing(rhs, st, t_prev, t, target);
                          return false;
                        }
                        t_prev = t;
                        g_prev = gv;
                      }
                      return true;
                    });
  return found;
}

// ---------------------------------------------------------------- classification

const char* to_string(GeodesicTag t) {
  switch (t) {
    case GeodesicTag::meridian:
      return "meridian";
    case GeodesicTag::equator:
      return "equator";
    case GeodesicTag::asymptotic_to_equator:
      return "asymptotic_to_equator";
    case GeodesicTag::oscillating:
      return "oscillating";
    case GeodesicTag::inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

struct Boundary {
  double s;
  bool tangential;  // r reaches |K| at a critical point: the orbit is asymptotic there
  bool found;
};

// Walk from s in direction dir (+1/-1) until r drops to k; report the first
// boundary point of the band {r >= k} and whether it is an equator.
Boundary band_edge(const Profile& p, double s, double k, int dir) {
  const double scale = std::max(1.0, p.r_max());
  const auto& grid = p.sample_grid();
  // Candidate tangential edges: equators of radius k lying in the direction.
  double nearest_tangent = dir > 0 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
  for (const auto& e : p.equators()) {
    if (std::abs(e.radius - k) <= 1e-9 * scale) {
      const double edge = dir > 0 ? e.plateau_begin : e.plateau_end;
      if (dir > 0 && e.s_c >= s && edge < nearest_tangent) nearest_tangent = std::max(edge, s);
      if (dir < 0 && e.s_c <= s && edge > nearest_tangent) nearest_tangent = std::min(edge, s);
    }
  }
  // Transversal edge: first grid point with r < k, then bisection.
  double prev = s;
  Boundary out{0, false, false};
  auto it = std::lower_bound(grid.begin(), grid.end(), s);
  std::vector<double> walk;
  if (dir > 0) {
    for (auto j = it; j != grid.end(); ++j) {
      if (*j > s) walk.push_back(*j);
    }
  } else {
    for (auto j = it; j != grid.begin();) {
      --j;
      if (*j < s) walk.push_back(*j);
    }
  }
  for (double x : walk) {
    if (p.r(x) - k < 0.0) {
      double lo = prev, hi = x;  // r(lo) >= k > r(hi)
      for (int i = 0; i < 200 && std::abs(hi - lo) > 1e-15 * (1 + std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (p.r(mid) >= k) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      out = {lo, false, true};
      break;
    }
    prev = x;
  }
  if (std::isfinite(nearest_tangent)) {
    if (!out.found || (dir > 0 ? nearest_tangent <= out.s : nearest_tangent >= out.s)) {
      return {nearest_tangent, true, true};
    }
  }
  return out;
}

}  // namespace

GeodesicClass classify(const UnitTangentState& u, const Profile& p, const NavigationParams& nav,
                       double horizon, double tol) {
  validate_wind(p, nav);
  GeodesicClass out;
  out.wind_caveat = nav.a != 0.0;
  if (out.wind_caveat) {
    out.note = "wind a != 0: the (beta, s) subsystem does not depend on a, so the Riemannian "
               "classification is applied unchanged";
  }
  if (!(u.s > 0.0 && u.s < p.half_length())) throw InvalidInput("classify: s must be interior");
  const double r = p.r(u.s);
  out.K = r * std::cos(u.beta);
  const double k = std::abs(out.K);
  const double scale = std::max(1.0, p.r_max());
  if (k <= 1e-14 * scale) {
    out.tag = GeodesicTag::meridian;
    return out;
  }
  const double sb = std::sin(u.beta);
  if (std::abs(sb) < 1e-12 && std::abs(p.dr(u.s)) < 1e-9) {
    out.tag = GeodesicTag::equator;
    out.s1 = out.s2 = out.s_limit = u.s;
    return out;
  }

  // Clairaut route: the orbit stays in the band around s where r >= |K|.
  const Boundary lo = band_edge(p, u.s, k, -1);
  const Boundary hi = band_edge(p, u.s, k, +1);
  if (!lo.found || !hi.found) {
    out.tag = GeodesicTag::inconclusive;
    out.note += (out.note.empty() ? "" : "; ");
    out.note += "Clairaut band not bounded";
    return out;
  }
  out.s1 = lo.s;
  out.s2 = hi.s;
  GeodesicTag predicted;
  if (!lo.tangential && !hi.tangential) {
    predicted = GeodesicTag::oscillating;
  } else {
    predicted = GeodesicTag::asymptotic_to_equator;
    const bool up = sb > 0.0;
    const Boundary& ahead = up ? hi : lo;
    const Boundary& behind = up ? lo : hi;
    out.s_limit = ahead.tangential ? ahead.s : behind.s;
  }

  // Integration route: count turning points of s within the horizon.
  if (horizon <= 0.0) horizon = 20.0 * p.M();
  const double band_tol = 1e-6 * std::max(1.0, p.half_length());
  // Approach to a hyperbolic equator is exponentially unstable numerically,
  // so an asymptotic orbit is confirmed once it is within band_tol.
  const bool stop_on_approach = predicted == GeodesicTag::asymptotic_to_equator;
  ReebRhs rhs{&p, nav.a};
  int turns = 0;
  double s_min_turn = std::numeric_limits<double>::infinity();
  double s_max_turn = -std::numeric_limits<double>::infinity();
  double last_s = u.s;
  try {
    ode::integrate<3>(rhs, 0.0, ode::State<3>{u.theta, u.beta, u.s}, horizon, options_for(tol),
                      [&](const ode::DenseStep<3>& st) {
                        const double d0 = std::sin(st.y0[1]), d1 = std::sin(st.y1[1]);
                        if ((d0 > 0) != (d1 > 0) && d0 != 0.0) {
                          // locate the extremum of s by bisection on sin(beta)
                          double a = st.t0, b = st.t1();
                          for (int i = 0; i < 100; ++i) {
                            const double m = 0.5 * (a + b);
                            if ((std::sin(st.at(m)[1]) > 0) == (d0 > 0)) {
                              a = m;
                            } else {
                              b = m;
                            }
                          }
                          const double s_turn = st.at(0.5 * (a + b))[2];
                          ++turns;
                          s_min_turn = std::min(s_min_turn, s_turn);
                          s_max_turn = std::max(s_max_turn, s_turn);
                        }
                        last_s = st.y1[2];
                        return !(stop_on_approach && turns <= 1 &&
                                 std::abs(last_s - out.s_limit) < band_tol);
                      });
  } catch (const NumericalFailure& e) {
    out.tag = GeodesicTag::inconclusive;
    out.note += (out.note.empty() ? "" : "; ");
    out.note += std::string("integration failed: ") + e.what();
    return out;
  }

  if (predicted == GeodesicTag::oscillating) {
    const bool both_sides = turns >= 2 && std::abs(s_min_turn - out.s1) < band_tol &&
                            std::abs(s_max_turn - out.s2) < band_tol;
    out.tag = both_sides ? GeodesicTag::oscillating : GeodesicTag::inconclusive;
    if (!both_sides) {
      out.note += (out.note.empty() ? "" : "; ");
      out.note += "turning points not observed on both sides within the horizon";
    }
  } else {
    // Asymptotic orbits turn at most once (at a transversal edge).
    const bool monotone_tail = turns <= 1;
    const bool approaching = std::abs(last_s - out.s_limit) < std::abs(u.s - out.s_limit) ||
                             std::abs(last_s - out.s_limit) < band_tol;
    out.tag = (monotone_tail && approaching) ? GeodesicTag::asymptotic_to_equator
                                             : GeodesicTag::inconclusive;
    if (out.tag == GeodesicTag::inconclusive) {
      out.note += (out.note.empty() ? "" : "; ");
      out.note += "integration does not confirm the asymptotic approach";
    }
  }
  return out;
}

}  // namespace systolic
