#include "systolic/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "profile_rep.hpp"
#include "systolic/error.hpp"
#include "systolic/quadrature.hpp"

namespace systolic {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double x) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

const char* to_string(EquatorKind k) {
  switch (k) {
    case EquatorKind::max:
      return "max";
    case EquatorKind::min:
      return "min";
    case EquatorKind::degenerate:
      return "degenerate";
  }
  return "?";
}

// ---------------------------------------------------------------- reps

ProfilePoint RoundRep::eval(double s) const {
  const double x = s / R_;
  const double sn = std::sin(x), cs = std::cos(x);
  return {R_ * sn, cs, -sn / R_, -R_ * cs, sn, cs / R_};
}

double RoundRep::half_length() const { return kPi * R_; }

TableRep::TableRep(double half_length, std::vector<Knot> knots)
    : half_(half_length), h_(half_length / static_cast<double>(knots.size() - 1)),
      knots_(std::move(knots)) {}

ProfilePoint TableRep::eval(double s) const {
  const std::size_t n = knots_.size() - 1;
  s = std::clamp(s, 0.0, half_);
  std::size_t j = static_cast<std::size_t>(s / h_);
  if (j >= n) j = n - 1;
  const double u = (s - static_cast<double>(j) * h_) / h_;
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;

  const double H0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
  const double H1 = 1 - H0;
  const double H2 = u - 6 * u3 + 8 * u4 - 3 * u5;
  const double H3 = -4 * u3 + 7 * u4 - 3 * u5;
  const double H4 = 0.5 * (u2 - 3 * u3 + 3 * u4 - u5);
  const double H5 = 0.5 * (u3 - 2 * u4 + u5);

  const double D0 = -30 * u2 + 60 * u3 - 30 * u4;
  const double D2 = 1 - 18 * u2 + 32 * u3 - 15 * u4;
  const double D3 = -12 * u2 + 28 * u3 - 15 * u4;
  const double D4 = 0.5 * (2 * u - 9 * u2 + 12 * u3 - 5 * u4);
  const double D5 = 0.5 * (3 * u2 - 8 * u3 + 5 * u4);

  const double E0 = -60 * u + 180 * u2 - 120 * u3;
  const double E2 = -36 * u + 96 * u2 - 60 * u3;
  const double E3 = -24 * u + 84 * u2 - 60 * u3;
  const double E4 = 0.5 * (2 - 18 * u + 36 * u2 - 20 * u3);
  const double E5 = 0.5 * (6 * u - 24 * u2 + 20 * u3);

  const Knot& a = knots_[j];
  const Knot& b = knots_[j + 1];
  const double h = h_;
  auto value = [&](double y0, double y1, double d0, double d1, double s0, double s1) {
    return H0 * y0 + H1 * y1 + h * (H2 * d0 + H3 * d1) + h * h * (H4 * s0 + H5 * s1);
  };
  auto first = [&](double y0, double y1, double d0, double d1, double s0, double s1) {
    return (D0 * (y0 - y1)) / h + (D2 * d0 + D3 * d1) + h * (D4 * s0 + D5 * s1);
  };
  auto second = [&](double y0, double y1, double d0, double d1, double s0, double s1) {
    return (E0 * (y0 - y1)) / (h * h) + (E2 * d0 + E3 * d1) / h + (E4 * s0 + E5 * s1);
  };
  ProfilePoint p;
  p.r = value(a.r, b.r, a.dr, b.dr, a.d2r, b.d2r);
  p.dr = first(a.r, b.r, a.dr, b.dr, a.d2r, b.d2r);
  p.d2r = second(a.r, b.r, a.dr, b.dr, a.d2r, b.d2r);
  p.z = value(a.z, b.z, a.dz, b.dz, a.d2z, b.d2z);
  p.dz = first(a.z, b.z, a.dz, b.dz, a.d2z, b.d2z);
  p.d2z = second(a.z, b.z, a.dz, b.dz, a.d2z, b.d2z);
  return p;
}

ProfilePoint ScaledRep::eval(double s) const {
  ProfilePoint p = base_->eval(s / c_);
  p.r *= c_;
  p.z *= c_;
  p.d2r /= c_;
  p.d2z /= c_;
  return p;
}

// ---------------------------------------------------------------- table builder

namespace {

struct PanelSums {
  double s, r, z;
};

PanelSums gl_panel(const ParametricCurve& c, double a, double b) {
  const auto& gl = quad::gauss_legendre_20();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  PanelSums out{0, 0, 0};
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double t = mid + half * gl.nodes[i];
    const CurvePoint p = c.eval(t);
    const double v = std::hypot(p.r_t, p.z_t);
    if (!(v > 1e-13)) throw InvalidInput(fmt("profile curve has zero speed near t = %.10g", t));
    out.s += gl.weights[i] * v;
    out.r += gl.weights[i] * p.r_t;
    out.z += gl.weights[i] * p.z_t;
  }
  out.s *= half;
  out.r *= half;
  out.z *= half;
  return out;
}

}  // namespace

std::shared_ptr<const TableRep> build_table(const ParametricCurve& c) {
  if (!(c.t_end > c.t_begin)) throw InvalidInput("empty parameter interval");
  std::vector<double> tk;
  const std::size_t P = std::max<std::size_t>(c.panels, 16);
  for (std::size_t k = 0; k <= P; ++k) {
    tk.push_back(c.t_begin + (c.t_end - c.t_begin) * static_cast<double>(k) / P);
  }
  for (double b : c.breakpoints) {
    if (b > c.t_begin && b < c.t_end) tk.push_back(b);
  }
  std::sort(tk.begin(), tk.end());
  const double gap = 1e-13 * (c.t_end - c.t_begin);
  tk.erase(std::unique(tk.begin(), tk.end(), [&](double x, double y) { return y - x < gap; }),
           tk.end());
  tk.back() = c.t_end;

  const std::size_t np = tk.size() - 1;
  std::vector<double> S(np + 1, 0.0), Rr(np + 1, 0.0), Z(np + 1, c.z_begin);
  for (std::size_t k = 0; k < np; ++k) {
    const PanelSums ps = gl_panel(c, tk[k], tk[k + 1]);
    S[k + 1] = S[k] + ps.s;
    Rr[k + 1] = Rr[k] + ps.r;
    Z[k + 1] = Z[k] + ps.z;
  }
  const double half = S.back();
  if (std::abs(Rr.back()) > 1e-3 * half) {
    throw InvalidInput(fmt("profile curve does not return to the axis (r_end = %.6g)", Rr.back()));
  }

  const std::size_t n = std::max<std::size_t>(c.knots, 64);
  std::vector<TableRep::Knot> knots(n + 1);
  std::size_t k = 0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double sj = half * static_cast<double>(j) / n;
    double t;
    PanelSums acc{0, 0, 0};
    if (j == 0) {
      t = c.t_begin;
      k = 0;
    } else if (j == n) {
      t = c.t_end;
      k = np - 1;
      acc = {S[np] - S[k], Rr[np] - Rr[k], Z[np] - Z[k]};
    } else {
      while (k + 1 < np && S[k + 1] < sj) ++k;
      const double a = tk[k], b = tk[k + 1];
      t = a + (b - a) * (sj - S[k]) / (S[k + 1] - S[k]);
      for (int it = 0; it < 40; ++it) {
        acc = gl_panel(c, a, t);
        const double g = S[k] + acc.s - sj;
        const CurvePoint p = c.eval(t);
        const double step = g / std::hypot(p.r_t, p.z_t);
        t = std::clamp(t - step, a, b);
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(t))) break;
      }
      acc = gl_panel(c, tk[k], t);
    }
    const CurvePoint p = c.eval(t);
    const double v = std::hypot(p.r_t, p.z_t);
    if (!(v > 1e-13)) throw InvalidInput(fmt("profile curve has zero speed near t = %.10g", t));
    const double dr = p.r_t / v, dz = p.z_t / v;
    const double vt = (p.r_t * p.r_tt + p.z_t * p.z_tt) / v;
    TableRep::Knot& kn = knots[j];
    kn.r = (j == 0) ? 0.0 : Rr[k] + acc.r;
    kn.z = (j == 0) ? c.z_begin : Z[k] + acc.z;
    kn.dr = dr;
    kn.dz = dz;
    kn.d2r = (p.r_tt - dr * vt) / (v * v);
    kn.d2z = (p.z_tt - dz * vt) / (v * v);
  }
  knots[n].r = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    if (!(knots[j].r > 0.0)) {
      throw InvalidInput(fmt("negative radius (r <= 0) at s = %.10g", half * double(j) / n));
    }
  }
  std::vector<double> rr, zz;
  const std::size_t stride = std::max<std::size_t>(1, n / 2048);
  for (std::size_t j = 0; j <= n; j += stride) {
    rr.push_back(knots[j].r);
    zz.push_back(knots[j].z);
  }
  if (rr.size() < 2 || (n % stride) != 0) {
    rr.push_back(knots[n].r);
    zz.push_back(knots[n].z);
  }
  if (!polyline_embedded(rr, zz)) throw InvalidInput("non-embedded profile curve");
  return std::make_shared<TableRep>(half, std::move(knots));
}

bool polyline_embedded(const std::vector<double>& r, const std::vector<double>& z) {
  const std::size_t n = r.size();
  auto orient = [](double ax, double ay, double bx, double by, double cx, double cy) {
    const double v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return (v > 0) - (v < 0);
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double minx = std::min(r[i], r[i + 1]), maxx = std::max(r[i], r[i + 1]);
    const double miny = std::min(z[i], z[i + 1]), maxy = std::max(z[i], z[i + 1]);
    for (std::size_t j = i + 2; j + 1 < n; ++j) {
      if (std::max(r[j], r[j + 1]) < minx || std::min(r[j], r[j + 1]) > maxx) continue;
      if (std::max(z[j], z[j + 1]) < miny || std::min(z[j], z[j + 1]) > maxy) continue;
      const int o1 = orient(r[i], z[i], r[i + 1], z[i + 1], r[j], z[j]);
      const int o2 = orient(r[i], z[i], r[i + 1], z[i + 1], r[j + 1], z[j + 1]);
      const int o3 = orient(r[j], z[j], r[j + 1], z[j + 1], r[i], z[i]);
      const int o4 = orient(r[j], z[j], r[j + 1], z[j + 1], r[i + 1], z[i + 1]);
      if (o1 * o2 < 0 && o3 * o4 < 0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- Profile

ProfilePoint Profile::eval(double s) const { return rep_->eval(s); }
double Profile::r(double s) const { return rep_->eval(s).r; }
double Profile::dr(double s) const { return rep_->eval(s).dr; }
double Profile::d2r(double s) const { return rep_->eval(s).d2r; }
double Profile::z(double s) const { return rep_->eval(s).z; }
double Profile::dz(double s) const { return rep_->eval(s).dz; }
double Profile::d2z(double s) const { return rep_->eval(s).d2z; }

Profile Profile::round(double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("round: radius must be positive");
  Profile p;
  p.rep_ = std::make_shared<RoundRep>(R);
  p.family_ = "round";
  p.params_ = {{"R", R}};
  p.finalize();
  return p;
}

Profile Profile::from_parametric(const ParametricCurve& curve, std::string family,
                                 std::map<std::string, double> params,
                                 std::vector<std::string> warnings) {
  Profile p;
  p.rep_ = build_table(curve);
  p.family_ = std::move(family);
  p.params_ = std::move(params);
  p.warnings_ = std::move(warnings);
  p.finalize();
  return p;
}

Profile Profile::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidInput("scale factor must be positive");
  Profile p = *this;
  p.rep_ = std::make_shared<ScaledRep>(rep_, c);
  p.half_ = c * half_;
  for (auto& e : p.equators_) {
    e.s_c *= c;
    e.radius *= c;
    e.euclidean_length *= c;
    e.plateau_begin *= c;
    e.plateau_end *= c;
  }
  p.minimal_ = {c * minimal_.s0, c * minimal_.r_min, c * minimal_.L};
  p.r_max_ = c * r_max_;
  p.s_r_max_ = c * s_r_max_;
  for (auto& s : p.grid_) s *= c;
  p.params_["scale"] = c * (params_.count("scale") ? params_.at("scale") : 1.0);
  return p;
}

namespace {

// Safeguarded Newton for g(s) = 0 on a sign-changing bracket.
template <class G, class DG>
double refine_root(G&& g, DG&& dg, double lo, double hi) {
  double glo = g(lo);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gx = g(x);
    if (gx == 0.0) return x;
    if ((gx < 0) == (glo < 0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
    }
    const double d = dg(x);
    double nx = (d != 0.0) ? x - gx / d : 0.5 * (lo + hi);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 4e-16 * std::max(1.0, hi)) {
      return nx;
    }
    x = nx;
  }
  return x;
}

}  // namespace

void Profile::finalize() {
  half_ = rep_->half_length();
  const std::size_t n = rep_->scan_points();
  std::vector<double> s(n + 1), d(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    s[i] = half_ * static_cast<double>(i) / n;
    d[i] = rep_->eval(s[i]).dr;
  }
  constexpr double kPlateauTol = 1e-9;
  std::vector<std::size_t> sig;
  for (std::size_t i = 0; i <= n; ++i) {
    if (std::abs(d[i]) >= kPlateauTol) sig.push_back(i);
  }
  equators_.clear();
  auto g = [&](double x) { return rep_->eval(x).dr; };
  auto dg = [&](double x) { return rep_->eval(x).d2r; };
  for (std::size_t q = 0; q + 1 < sig.size(); ++q) {
    const std::size_t a = sig[q], b = sig[q + 1];
    const std::size_t gap = b - a - 1;
    if (gap >= 3) {
      EquatorInfo e;
      e.plateau_begin = s[a + 1];
      e.plateau_end = s[b - 1];
      e.s_c = 0.5 * (e.plateau_begin + e.plateau_end);
      e.radius = rep_->eval(e.s_c).r;
      e.kind = EquatorKind::degenerate;
      e.euclidean_length = 2 * kPi * e.radius;
      equators_.push_back(e);
      continue;
    }
    if ((d[a] < 0) == (d[b] < 0)) continue;
    EquatorInfo e;
    e.s_c = refine_root(g, dg, s[a], s[b]);
    e.plateau_begin = e.plateau_end = e.s_c;
    const ProfilePoint pt = rep_->eval(e.s_c);
    e.radius = pt.r;
    e.euclidean_length = 2 * kPi * e.radius;
    if (pt.d2r < -1e-8) {
      e.kind = EquatorKind::max;
    } else if (pt.d2r > 1e-8) {
      e.kind = EquatorKind::min;
    } else {
      e.kind = EquatorKind::degenerate;
    }
    equators_.push_back(e);
  }
  if (equators_.empty()) throw NumericalFailure("no critical point of r found on (0, M/2)");

  const EquatorInfo* best = &equators_.front();
  for (const auto& e : equators_) {
    if (e.radius < best->radius * (1 - 1e-12)) best = &e;
  }
  minimal_ = {best->s_c, best->radius, 2 * kPi * best->radius};
  r_max_ = 0;
  for (const auto& e : equators_) {
    if (e.radius > r_max_) {
      r_max_ = e.radius;
      s_r_max_ = e.s_c;
    }
  }

  grid_.clear();
  const std::size_t ng = 2048;
  for (std::size_t i = 0; i <= ng; ++i) grid_.push_back(half_ * static_cast<double>(i) / ng);
  for (const auto& e : equators_) {
    grid_.push_back(e.s_c);
    grid_.push_back(e.plateau_begin);
    grid_.push_back(e.plateau_end);
  }
  std::sort(grid_.begin(), grid_.end());
  grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
}

std::vector<EquatorInfo> equators(const Profile& p) { return p.equators(); }
MinimalEquator minimal_equator(const Profile& p) { return p.minimal_equator(); }

}  // namespace systolic
