#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "profile_rep.hpp"
#include "systolic/error.hpp"
#include "systolic/profile.hpp"
#include "systolic/quadrature.hpp"

namespace systolic {

namespace {

constexpr double kPi = std::numbers::pi;

double get(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double require(const std::map<std::string, double>& p, const std::string& key,
               const std::string& family) {
  auto it = p.find(key);
  if (it == p.end()) throw InvalidInput(family + ": missing parameter '" + key + "'");
  if (!std::isfinite(it->second)) throw InvalidInput(family + ": parameter '" + key + "' is not finite");
  return it->second;
}

// C-infinity step from 0 (x <= 0) to 1 (x >= 1) with derivatives.
struct Step {
  double v, d1, d2;
};

Step smoothstep(double x) {
  if (x <= 0.0) return {0, 0, 0};
  if (x >= 1.0) return {1, 0, 0};
  const double y = 1.0 - x;
  const double A = std::exp(-1.0 / x), B = std::exp(-1.0 / y);
  const double A1 = A / (x * x), B1 = -B / (y * y);
  const double A2 = A * (1.0 / (x * x * x * x) - 2.0 / (x * x * x));
  const double B2 = B * (1.0 / (y * y * y * y) - 2.0 / (y * y * y));
  const double D = A + B;
  const double N = A1 * B - A * B1;
  const double N1 = A2 * B - A * B2;
  const double D1 = A1 + B1;
  return {A / D, N / (D * D), (N1 * D - 2.0 * N * D1) / (D * D * D)};
}

// Arc-length curve given by its tangent angle phi(u): a list of pieces,
// each either constant or a smooth turn between two angles.
struct AnglePiece {
  double u0, width, phi0, phi1;
};

struct AngleCurve {
  std::vector<AnglePiece> pieces;
  double total = 0;

  void add(double width, double phi0, double phi1) {
    pieces.push_back({total, width, phi0, phi1});
    total += width;
  }

  CurvePoint eval(double u) const {
    auto it = std::upper_bound(pieces.begin(), pieces.end(), u,
                               [](double x, const AnglePiece& p) { return x < p.u0; });
    const AnglePiece& p = (it == pieces.begin()) ? pieces.front() : *(it - 1);
    const Step st = smoothstep((u - p.u0) / p.width);
    const double dphi = p.phi1 - p.phi0;
    const double phi = p.phi0 + dphi * st.v;
    const double phi1 = dphi * st.d1 / p.width;
    const double c = std::cos(phi), s = std::sin(phi);
    return {c, -s * phi1, s, c * phi1};
  }
};

// Radial displacement over a full turn of width w from phi0 to phi1, or over
// its first half.
double turn_dr(double w, double phi0, double phi1, double upto = 1.0) {
  auto r = quad::adaptive([&](double x) { return std::cos(phi0 + (phi1 - phi0) * smoothstep(x).v); },
                          0.0, upto, 1e-15, 1e-14);
  return w * r.value;
}

}  // namespace

Profile ellipsoid(double a, double c) {
  if (!(a > 0.0) || !(c > 0.0)) throw InvalidInput("ellipsoid: semi-axes must be positive");
  ParametricCurve pc;
  pc.t_begin = 0;
  pc.t_end = kPi;
  pc.z_begin = -c;
  pc.eval = [a, c](double t) {
    const double sn = std::sin(t), cs = std::cos(t);
    return CurvePoint{a * cs, -a * sn, c * sn, c * cs};
  };
  return Profile::from_parametric(pc, "ellipsoid", {{"a", a}, {"c", c}});
}

Profile dumbbell(double d, double c) {
  if (!(d >= 0.0) || !(c > 0.0)) throw InvalidInput("dumbbell: need d >= 0 and c > 0");
  ParametricCurve pc;
  pc.t_begin = 0;
  pc.t_end = kPi;
  pc.z_begin = -c;
  pc.eval = [d, c](double t) {
    const double sn = std::sin(t), cs = std::cos(t);
    const double r_t = cs * (1 - 2 * d + 3 * d * cs * cs);
    const double r_tt = -sn * (1 - 2 * d + 9 * d * cs * cs);
    return CurvePoint{r_t, r_tt, c * sn, c * cs};
  };
  return Profile::from_parametric(pc, "dumbbell", {{"d", d}, {"c", c}});
}

Profile spiked(double R, double spike_len, double neck, double half_thickness, double taper) {
  if (!(R > 0) || !(spike_len > 0) || !(neck > 0) || !(half_thickness > 0)) {
    throw InvalidInput("spiked: lengths must be positive");
  }
  if (!(taper >= 0.0 && taper < 1.0)) throw InvalidInput("spiked: taper must lie in [0, 1)");
  if (!(neck < 0.5 * R)) throw InvalidInput("spiked: neck must be smaller than disk_radius / 2");
  const double rim_w = kPi * half_thickness;
  const double junction_w = 2.0 * neck;
  const double cap_w = neck * (1.0 - taper);
  const double sin_delta = neck * taper / spike_len;
  if (!(sin_delta < 0.5)) throw InvalidInput("spiked: spike too short for the requested taper");
  const double spike_phi = 0.5 * kPi + std::asin(sin_delta);

  const double rim_half = turn_dr(rim_w, 0.0, kPi, 0.5);
  const double bottom = R - rim_half;
  const double junction = turn_dr(junction_w, kPi, spike_phi);
  const double top = R - rim_half + junction - neck;
  const double cap = turn_dr(cap_w, spike_phi, kPi);
  const double tip_flat = neck * (1.0 - taper) + cap;
  if (!(bottom > 0) || !(top > 0) || !(tip_flat > 0)) {
    throw InvalidInput("spiked: parameters leave no room for the flat faces");
  }

  AngleCurve ac;
  ac.add(bottom, 0.0, 0.0);
  ac.add(rim_w, 0.0, kPi);
  ac.add(top, kPi, kPi);
  ac.add(junction_w, kPi, spike_phi);
  ac.add(spike_len, spike_phi, spike_phi);
  ac.add(cap_w, spike_phi, kPi);
  ac.add(tip_flat, kPi, kPi);

  ParametricCurve pc;
  pc.t_begin = 0;
  pc.t_end = ac.total;
  pc.z_begin = -half_thickness;
  for (const auto& p : ac.pieces) pc.breakpoints.push_back(p.u0);
  pc.eval = [ac](double u) { return ac.eval(u); };
  // Resolve the narrowest turn with a few hundred knots.
  const double finest = std::min({rim_w, junction_w, cap_w});
  pc.knots = static_cast<std::size_t>(std::clamp(ac.total / (finest / 300.0), 8192.0, 200000.0));
  pc.panels = std::max<std::size_t>(4096, pc.knots / 4);
  return Profile::from_parametric(pc, "spiked",
                                  {{"disk_radius", R},
                                   {"spike_len", spike_len},
                                   {"neck", neck},
                                   {"half_thickness", half_thickness},
                                   {"taper", taper}});
}

// ---------------------------------------------------------------- Darboux

ZPlus ZPlus::hemisphere(double R) {
  ZPlus z;
  z.R = R;
  z.support = 0.0;
  z.d = z.d1 = z.d2 = [](double) { return 0.0; };
  return z;
}

ZPlus ZPlus::bump(double R, double A, double w) {
  if (!(w > 0.0 && w < R)) throw InvalidInput("bump: width must lie in (0, R)");
  ZPlus z;
  z.R = R;
  z.support = w;
  z.d = [A, w](double x) {
    const double q = 1 - (x / w) * (x / w);
    return q <= 0 ? 0.0 : A * std::exp(1 - 1 / q);
  };
  z.d1 = [A, w](double x) {
    const double q = 1 - (x / w) * (x / w);
    if (q <= 0) return 0.0;
    const double u = -2 * x / (w * w * q * q);
    return A * std::exp(1 - 1 / q) * u;
  };
  z.d2 = [A, w](double x) {
    const double q = 1 - (x / w) * (x / w);
    if (q <= 0) return 0.0;
    const double w2 = w * w;
    const double u = -2 * x / (w2 * q * q);
    const double u1 = -2 / (w2 * q * q) - 8 * x * x / (w2 * w2 * q * q * q);
    return A * std::exp(1 - 1 / q) * (u * u + u1);
  };
  return z;
}

namespace {

// Lower-branch quantities at parameter t in (0, pi/2], rho = R sin t.
struct Lower {
  double diff;  // sp_minus - R cos t, must stay positive off the pole
  double h;     // z_t
  double z_tt;
};

Lower lower_branch(const ZPlus& zp, double t) {
  const double R = zp.R;
  const double sn = std::sin(t), cs = std::cos(t);
  const double rho = R * sn;
  const double d1 = zp.d1(rho), d2 = zp.d2(rho);
  const double w = -R * sn + R * cs * d1;
  const double w_t = -R * cs - R * sn * d1 + R * R * cs * cs * d2;
  const double sp_plus = std::sqrt(R * R * cs * cs + w * w);
  const double sp_minus = 2 * R - sp_plus;
  const double half_sin = std::sin(0.5 * t);
  const double diff = 4 * R * half_sin * half_sin - w * w / (sp_plus + R * cs);
  Lower out{diff, 0.0, 0.0};
  if (diff <= 0) return out;
  out.h = std::sqrt(diff * (sp_minus + R * cs));
  const double sp_plus_t = (-R * R * cs * sn + w * w_t) / sp_plus;
  const double sp_minus_t = -sp_plus_t;
  out.z_tt = (sp_minus * sp_minus_t + R * R * cs * sn) / out.h;
  return out;
}

}  // namespace

Profile darboux_zoll(const ZPlus& zp) {
  const double R = zp.R;
  if (!(R > 0.0)) throw InvalidInput("darboux_zoll: R must be positive");
  if (!(zp.support >= 0.0 && zp.support < R)) {
    throw InvalidInput("darboux_zoll: deformation must be supported inside (-R, R)");
  }
  if (!zp.d || !zp.d1 || !zp.d2) throw InvalidInput("darboux_zoll: deformation callables missing");
  // Scan the precondition on a fine rho-grid over the deformation's support
  // (outside it z+ is the hemisphere and the inequality holds strictly).
  const std::size_t scan = zp.support > 0.0 ? 20000 : 0;
  for (std::size_t i = 1; i <= scan; ++i) {
    const double rho = zp.support * static_cast<double>(i) / scan;
    if (rho >= R) break;
    const double t = std::asin(rho / R);
    if (!(lower_branch(zp, t).diff > 0.0)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "darboux_zoll: precondition 2R/sqrt(R^2-rho^2) - sqrt(1+z+'^2) > 1 violated "
                    "at rho = %.6g",
                    rho);
      throw InvalidInput(buf);
    }
  }

  constexpr double kDelta = 1e-6;
  const double slope0 = lower_branch(zp, kDelta).h / kDelta;
  ParametricCurve pc;
  pc.t_begin = 0;
  pc.t_end = kPi;
  pc.breakpoints = {0.5 * kPi};
  pc.eval = [zp, slope0](double t) {
    const double R = zp.R;
    const double sn = std::sin(t), cs = std::cos(t);
    CurvePoint p;
    p.r_t = R * cs;
    p.r_tt = -R * sn;
    if (t >= 0.5 * kPi) {
      const double rho = R * sn;
      const double d1 = zp.d1(rho), d2 = zp.d2(rho);
      p.z_t = R * sn + d1 * R * cs;
      p.z_tt = R * cs + d2 * R * R * cs * cs - d1 * R * sn;
    } else if (t < kDelta) {
      // z_t vanishes linearly at the south pole.
      p.z_t = slope0 * t;
      p.z_tt = slope0;
    } else {
      const Lower lo = lower_branch(zp, t);
      if (!(lo.diff > 0.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "darboux_zoll: precondition violated at rho = %.6g", R * sn);
        throw InvalidInput(buf);
      }
      p.z_t = lo.h;
      p.z_tt = lo.z_tt;
    }
    return p;
  };
  // z(pi/2) = d(R) = 0 fixes the constant: z(0) = -integral of z_t over [0, pi/2].
  {
    auto lower = quad::adaptive([&](double t) { return pc.eval(t).z_t; }, 0.0, 0.5 * kPi, 1e-14,
                                1e-14);
    pc.z_begin = -lower.value;
  }
  pc.panels = 8192;
  pc.knots = 16384;
  std::map<std::string, double> params{{"R", R}, {"support", zp.support}};
  return Profile::from_parametric(pc, "darboux_zoll", std::move(params));
}

// ---------------------------------------------------------------- samples

namespace {

// Not-a-knot cubic spline in second-derivative form.
struct Spline {
  std::vector<double> x, y, m;

  Spline(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
    const std::size_t n = x.size();
    m.assign(n, 0.0);
    std::vector<double> h(n - 1), dd(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      dd[i] = (y[i + 1] - y[i]) / h[i];
    }
    // Unknowns m[1..n-2]; tridiagonal after eliminating m[0], m[n-1].
    const std::size_t k = n - 2;
    std::vector<double> lo(k, 0), di(k, 0), up(k, 0), rhs(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = j + 1;
      lo[j] = h[i - 1];
      di[j] = 2 * (h[i - 1] + h[i]);
      up[j] = h[i];
      rhs[j] = 6 * (dd[i] - dd[i - 1]);
    }
    // m0 = ((h0 + h1) m1 - h0 m2) / h1
    di[0] += h[0] * (h[0] + h[1]) / h[1];
    if (k > 1) up[0] -= h[0] * h[0] / h[1];
    // m_{n-1} = ((h_{n-2} + h_{n-3}) m_{n-2} - h_{n-2} m_{n-3}) / h_{n-3}
    const double ha = h[n - 3], hb = h[n - 2];
    di[k - 1] += hb * (ha + hb) / ha;
    if (k > 1) lo[k - 1] -= hb * hb / ha;
    for (std::size_t j = 1; j < k; ++j) {
      const double f = lo[j] / di[j - 1];
      di[j] -= f * up[j - 1];
      rhs[j] -= f * rhs[j - 1];
    }
    std::vector<double> sol(k);
    sol[k - 1] = rhs[k - 1] / di[k - 1];
    for (std::size_t j = k - 1; j-- > 0;) sol[j] = (rhs[j] - up[j] * sol[j + 1]) / di[j];
    for (std::size_t j = 0; j < k; ++j) m[j + 1] = sol[j];
    m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
    m[n - 1] = ((ha + hb) * m[n - 2] - hb * m[n - 3]) / ha;
  }

  // value, first, second derivative
  std::array<double, 3> eval(double t) const {
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    i = std::clamp<std::size_t>(i, 1, x.size() - 1) - 1;
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - t) / h, b = (t - x[i]) / h;
    const double v = a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6;
    const double d1 = (y[i + 1] - y[i]) / h - (3 * a * a - 1) * h / 6 * m[i] + (3 * b * b - 1) * h / 6 * m[i + 1];
    const double d2 = a * m[i] + b * m[i + 1];
    return {v, d1, d2};
  }
};

}  // namespace

Profile from_samples(const std::vector<SamplePoint>& pts) {
  if (pts.size() < 4) throw InvalidInput("from_samples: need at least 4 samples");
  std::vector<double> s, r, z;
  for (const auto& p : pts) {
    if (!std::isfinite(p.s) || !std::isfinite(p.r) || !std::isfinite(p.z)) {
      throw InvalidInput("from_samples: non-finite sample");
    }
    s.push_back(p.s);
    r.push_back(p.r);
    z.push_back(p.z);
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) throw InvalidInput("from_samples: s must be strictly increasing");
  }
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!(r[i] > 0.0)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "from_samples: negative radius at s = %.10g", s[i]);
      throw InvalidInput(buf);
    }
  }
  double scale = 0;
  for (double x : r) scale = std::max(scale, x);
  std::vector<std::string> warnings;
  const double end_tol = 1e-4 * std::max(scale, s.back() - s.front());
  if (std::abs(r.front()) > end_tol || std::abs(r.back()) > end_tol) {
    throw InvalidInput("from_samples: curve must start and end on the axis (r = 0)");
  }
  if (!polyline_embedded(r, z)) throw InvalidInput("from_samples: non-embedded profile curve");

  auto rs = std::make_shared<Spline>(s, r);
  auto zs = std::make_shared<Spline>(s, z);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = std::hypot(rs->eval(s[i])[1], zs->eval(s[i])[1]);
    if (!(v > 1e-12)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "from_samples: zero speed at s = %.10g", s[i]);
      throw InvalidInput(buf);
    }
  }
  // Endpoint conditions: r = 0 and the curve meets the axis orthogonally.
  auto check_end = [&](double t, double expect_dr, const char* which) {
    const auto a = rs->eval(t), b = zs->eval(t);
    const double v = std::hypot(a[1], b[1]);
    const double dev = std::max(std::abs(a[0]), std::abs(a[1] / v - expect_dr));
    if (dev > 1e-8) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s endpoint conditions hold only to %.3g%s", which, dev,
                    dev > 1e-4 ? " (beyond 1e-4)" : "");
      warnings.emplace_back(buf);
    }
  };
  check_end(s.front(), 1.0, "south");
  check_end(s.back(), -1.0, "north");

  ParametricCurve pc;
  pc.t_begin = s.front();
  pc.t_end = s.back();
  pc.z_begin = z.front();
  pc.breakpoints = s;
  pc.panels = 1024;
  pc.knots = std::clamp<std::size_t>(4 * s.size(), 8192, 65536);
  pc.eval = [rs, zs](double t) {
    const auto a = rs->eval(t), b = zs->eval(t);
    return CurvePoint{a[1], a[2], b[1], b[2]};
  };
  return Profile::from_parametric(pc, "samples", {{"n", static_cast<double>(s.size())}},
                                  std::move(warnings));
}

std::vector<SamplePoint> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open samples file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("samples file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "s,r,z") throw InvalidInput("samples file must start with header 's,r,z'");
  std::vector<SamplePoint> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw InvalidInput("samples file: malformed line " + std::to_string(lineno));
    }
    try {
      out.push_back({std::stod(a), std::stod(b), std::stod(c)});
    } catch (const std::exception&) {
      throw InvalidInput("samples file: malformed number on line " + std::to_string(lineno));
    }
  }
  return out;
}

// ---------------------------------------------------------------- dispatch

Profile from_family(const std::string& name, const std::map<std::string, double>& p) {
  if (name == "round") return Profile::round(require(p, "R", name));
  if (name == "ellipsoid") return ellipsoid(require(p, "a", name), require(p, "c", name));
  if (name == "spiked") {
    return spiked(require(p, "disk_radius", name), require(p, "spike_len", name),
                  require(p, "neck", name), get(p, "half_thickness", 0.05), get(p, "taper", 0.5));
  }
  if (name == "dumbbell") return dumbbell(require(p, "d", name), get(p, "c", 1.0));
  if (name == "darboux_zoll") {
    const double R = get(p, "R", 1.0);
    const double A = get(p, "amplitude", 0.0);
    if (A == 0.0) return darboux_zoll(ZPlus::hemisphere(R));
    return darboux_zoll(ZPlus::bump(R, A, require(p, "width", name)));
  }
  throw InvalidInput("unknown profile family '" + name + "'");
}

}  // namespace systolic
