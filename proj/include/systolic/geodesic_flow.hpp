#pragma once

// Reeb/geodesic flow of the Zermelo metric with rotational wind a * d/dtheta
// on a sphere of revolution, in the coordinates (theta, beta, s).

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "systolic/ode.hpp"
#include "systolic/profile.hpp"

namespace systolic {

struct UnitTangentState {
  double theta = 0;  // unwrapped
  double beta = 0;
  double s = 0;
};

struct NavigationParams {
  double a = 0;
};

/// Throws InvalidInput unless |a| * r_max < 1.
void validate_wind(const Profile& p, const NavigationParams& nav);

struct ReebVector {
  double dtheta, dbeta, ds;
};

ReebVector reeb_field(const UnitTangentState& u, const Profile& p, const NavigationParams& nav);

/// K = r(s) cos(beta); zero at the poles.
double clairaut(const UnitTangentState& u, const Profile& p);

/// Norm of the tangent vector A d/dtheta + B d/ds at arc length s.
double finsler_norm(const Profile& p, const NavigationParams& nav, double s, double A, double B);

/// Right-hand side used by every integration in the library.
struct ReebRhs {
  const Profile* profile;
  double a;
  bool operator()(double, const ode::State<3>& y, ode::State<3>& dy) const;
};

class Trajectory {
 public:
  UnitTangentState at(double t) const;
  double t_end() const { return t_end_; }
  UnitTangentState start() const { return start_; }
  UnitTangentState end() const { return at(t_end_); }
  double max_clairaut_drift() const { return drift_; }
  double clairaut_initial() const { return k0_; }
  const std::vector<ode::DenseStep<3>>& steps() const { return steps_; }

  struct Sample {
    double t, theta, beta, s, K;
  };
  /// n + 1 equally spaced samples on [0, t_end].
  std::vector<Sample> sample(std::size_t n, const Profile& p) const;

 private:
  friend Trajectory integrate(const UnitTangentState&, const Profile&, const NavigationParams&,
                              double, double);
  UnitTangentState start_;
  double t_end_ = 0;
  double drift_ = 0;
  double k0_ = 0;
  std::vector<ode::DenseStep<3>> steps_;
};

Trajectory integrate(const UnitTangentState& u, const Profile& p, const NavigationParams& nav,
                     double t_end, double tol = 1e-10);

struct Crossing {
  double t;
  UnitTangentState state;
};

/// First t > 0 with s(t) = s_target and ds/dt > 0, searched up to `horizon`.
std::optional<Crossing> first_upward_crossing(const UnitTangentState& u, const Profile& p,
                                              const NavigationParams& nav, double s_target,
                                              double horizon, double tol = 1e-10);

enum class GeodesicTag { meridian, equator, asymptotic_to_equator, oscillating, inconclusive };
const char* to_string(GeodesicTag t);

struct GeodesicClass {
  GeodesicTag tag = GeodesicTag::inconclusive;
  double K = 0;
  double s1 = 0, s2 = 0;  // oscillation band (oscillating) or Clairaut band
  double s_limit = 0;     // forward limit (asymptotic)
  bool wind_caveat = false;
  std::string note;
};

/// horizon <= 0 selects 20 M of flow time.
GeodesicClass classify(const UnitTangentState& u, const Profile& p, const NavigationParams& nav,
                       double horizon = 0.0, double tol = 1e-10);

}  // namespace systolic
