#pragma once

// Profile curves (r(s), z(s)) of spheres of revolution, parametrized by arc
// length s in [0, M/2] from the south pole.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace systolic {

struct ProfilePoint {
  double r = 0, dr = 0, d2r = 0;
  double z = 0, dz = 0, d2z = 0;
};

enum class EquatorKind { max, min, degenerate };
const char* to_string(EquatorKind k);

struct EquatorInfo {
  double s_c = 0;
  double radius = 0;
  EquatorKind kind = EquatorKind::max;
  double euclidean_length = 0;  // 2 pi radius
  // A degenerate plateau of critical points [plateau_begin, plateau_end];
  // both equal s_c for isolated critical points.
  double plateau_begin = 0, plateau_end = 0;
};

struct MinimalEquator {
  double s0 = 0;
  double r_min = 0;
  double L = 0;
};

/// A regular parametrization t -> (r(t), z(t)) handed to the arc-length
/// reparametrizer. r and z are recovered by integrating r_t and z_t from the
/// start point, so eval only needs first and second derivatives.
struct CurvePoint {
  double r_t = 0, r_tt = 0, z_t = 0, z_tt = 0;
};

struct ParametricCurve {
  std::function<CurvePoint(double)> eval;
  double t_begin = 0, t_end = 0;
  double z_begin = 0;
  std::vector<double> breakpoints;  // eval may lose smoothness only here
  std::size_t panels = 4096;        // uniform t-panels (breakpoints are added)
  std::size_t knots = 8192;         // uniform arc-length knots in the table
};

class ProfileRep;

class Profile {
 public:
  Profile() = default;

  double M() const { return half_ * 2.0; }
  double half_length() const { return half_; }

  ProfilePoint eval(double s) const;
  double r(double s) const;
  double dr(double s) const;
  double d2r(double s) const;
  double z(double s) const;
  double dz(double s) const;
  double d2z(double s) const;

  const std::vector<EquatorInfo>& equators() const { return equators_; }
  MinimalEquator minimal_equator() const { return minimal_; }
  double r_max() const { return r_max_; }
  double s_at_r_max() const { return s_r_max_; }

  /// Increasing s-samples (including 0, M/2 and every equator) fine enough
  /// that each sign change of r - kappa is bracketed by consecutive entries.
  const std::vector<double>& sample_grid() const { return grid_; }

  const std::string& family() const { return family_; }
  const std::map<std::string, double>& params() const { return params_; }
  /// Non-fatal diagnostics, e.g. endpoint conditions met only approximately.
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// The homothetic profile (c r, c z) reparametrized by arc length.
  Profile scaled(double c) const;

  bool valid() const { return static_cast<bool>(rep_); }

  // Construction entry points (see also the free functions below).
  static Profile round(double R);
  static Profile from_parametric(const ParametricCurve& curve, std::string family,
                                 std::map<std::string, double> params,
                                 std::vector<std::string> warnings = {});

 private:
  void finalize();

  std::shared_ptr<const ProfileRep> rep_;
  double half_ = 0;
  std::vector<EquatorInfo> equators_;
  MinimalEquator minimal_;
  double r_max_ = 0, s_r_max_ = 0;
  std::vector<double> grid_;
  std::string family_;
  std::map<std::string, double> params_;
  std::vector<std::string> warnings_;
};

/// Families: "round" {R}, "ellipsoid" {a, c}, "spiked" {disk_radius, spike_len,
/// neck, half_thickness, taper}, "dumbbell" {d, c}, "darboux_zoll" {R,
/// amplitude, width}. Missing optional parameters take documented defaults.
Profile from_family(const std::string& name, const std::map<std::string, double>& params);

Profile ellipsoid(double a, double c);
Profile spiked(double disk_radius, double spike_len, double neck, double half_thickness = 0.05,
               double taper = 0.5);
/// r = sin t (1 + d cos^2 t), z = -c cos t. For d > 1/2 the waist is a local
/// minimum of r between two larger maxima.
Profile dumbbell(double d, double c);

struct SamplePoint {
  double s, r, z;
};
/// Not-a-knot cubic splines through the samples, then arc-length
/// reparametrization. Samples may use any increasing parameter in place of s.
Profile from_samples(const std::vector<SamplePoint>& points);
std::vector<SamplePoint> read_samples_csv(const std::string& path);

/// Upper half z+ of a Darboux generating curve: the hemisphere sqrt(R^2 - rho^2)
/// plus an even deformation d supported in |rho| < support < R.
struct ZPlus {
  double R = 1.0;
  double support = 0.0;
  std::function<double(double)> d, d1, d2;

  static ZPlus hemisphere(double R);
  /// d(rho) = amplitude * exp(1 - 1 / (1 - (rho/width)^2)) for |rho| < width.
  static ZPlus bump(double R, double amplitude, double width);
};

/// Builds the lower half from z+ so that every meridian has length 2 pi R and
/// the resulting sphere is Zoll. Throws InvalidInput naming rho when
/// 2R / sqrt(R^2 - rho^2) - sqrt(1 + z+'(rho)^2) > 1 fails.
Profile darboux_zoll(const ZPlus& z_plus);

std::vector<EquatorInfo> equators(const Profile& p);
MinimalEquator minimal_equator(const Profile& p);

}  // namespace systolic
