#pragma once

// First return to the Birkhoff annulus of the minimal equator and the
// generating function F, computed from the flow (winding numbers integrated
// in eta) and, independently, from areas of Clairaut superlevel sets.

#include <cstddef>
#include <string>
#include <vector>

#include "systolic/profile.hpp"

namespace systolic {

struct FirstReturn {
  double tau = 0;
  double theta_advance = 0;  // unwrapped
  double W = 0;              // theta_advance / 2 pi
};

/// Starts at (theta, beta, s) = (0, arccos(-eta), s0). eta = 0 is the
/// meridian: tau = M and W = +1 (the limit from eta < 0).
FirstReturn first_return(double eta, const Profile& p, double tol = 1e-10);

/// L W + L for eta > 0, L W - L for eta < 0, and 0 at eta = 0.
double f_from_winding(double eta, double W, double L);

/// L |eta| + integral over {r > kappa} of 2 sqrt(1 - kappa^2 / r^2) ds,
/// kappa = r_min |eta|. Valid on the closed interval [-1, 1].
double F_area(double eta, const Profile& p, double tol = 1e-11);

struct GammaIntegrals {
  double cos_part = 0;  // integral over {r >= r_min} of 2 sqrt(1 - r_min^2 / r^2) ds
  double r_part = 0;    // integral over {r >= r_min} of 2 r arccos(r_min / r) ds
};
GammaIntegrals gamma_integrals(const Profile& p, double tol = 1e-11);

struct GridSpec {
  std::size_t nodes = 201;  // odd, >= 21; includes eta = -1, 0, 1
  double epsilon = 1e-3;    // flow nodes cover [-1 + epsilon, 1 - epsilon]
  double integrator_tol = 1e-10;
  double quad_tol = 1e-10;  // per eta-panel, relative to L
  double area_tol = 1e-11;
  double crosscheck_tol = 1e-5;
  bool enforce_crosscheck = true;
  std::size_t threads = 0;
};

enum class NodeMethod { ode, area, analytic };
const char* to_string(NodeMethod m);

struct GeneratingTable {
  std::vector<double> eta;
  std::vector<double> F;       // flow route (area route at eta = +-1)
  std::vector<double> f;       // F'; NaN at eta = +-1
  std::vector<double> tau;     // NaN at eta = +-1
  std::vector<double> W;       // NaN at eta = +-1
  std::vector<double> F_area;  // area route at every node
  std::vector<double> T_quad;  // integral of tau from 0 (NaN at eta = +-1)
  std::vector<double> int_F;   // integral of F from 0 to eta
  std::vector<NodeMethod> method;

  double L = 0, M = 0, r_min = 0, s0 = 0, r_max = 0;
  double F_end = 0;  // F(+-1) = L + Gamma cos-integral
  GammaIntegrals gamma;
  double int_F_0_1 = 0;
  double max_discrepancy = 0;  // max node |F_flow - F_area|
  std::size_t worst_node = 0;
  GridSpec spec;

  std::size_t size() const { return eta.size(); }
  std::size_t center() const { return eta.size() / 2; }
  /// F(eta) = F(-eta) and f(eta) = -f(-eta) defects over interior nodes.
  double parity_defect_F() const;
  double parity_defect_f() const;
  /// max over interior nodes of |tau - (F - eta f)|
  double consistency_defect() const;
};

GeneratingTable build_generating_table(const Profile& p, const GridSpec& spec = {});

/// Node positions for a grid spec.
std::vector<double> grid_nodes(const GridSpec& spec);

}  // namespace systolic
