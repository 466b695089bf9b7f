#pragma once

// Generating function of the return map of the Zermelo flow with rotational
// wind a, F_a = F + a r_min T, its fixed points, and the search for a short
// closed orbit below the F-minimizer when a > 0.

#include <optional>
#include <string>
#include <vector>

#include "systolic/profile.hpp"
#include "systolic/return_map.hpp"

namespace systolic {

struct FinslerTable {
  GeneratingTable base;
  double a = 0;
  std::vector<double> T;         // 2 int_0^eta F - eta F, every node
  std::vector<double> Fa;
  std::vector<double> Fa_prime;  // f + a r_min tau; NaN at eta = +-1
  double Fa_minus = 0, Fa_plus = 0;  // F_a(-1), F_a(1)
  double max_T_disagreement = 0;     // interior |T_quad - T|

  std::size_t size() const { return base.size(); }
  const std::vector<double>& eta() const { return base.eta; }
};

/// Throws NumericalFailure if the quadrature and closed-form T disagree
/// beyond t_tol, InvalidInput if |a| r_max >= 1.
FinslerTable build_finsler_table(const GeneratingTable& table, double a, double t_tol = 1e-6);

struct FixedPoint {
  double eta = 0;
  long k = 0;          // F_a'(eta) = L k
  double length = 0;   // tau(eta)
  bool at_node = false;
};

struct FixedPointSet {
  std::vector<FixedPoint> points;
  /// F_a' constant over the grid (Zoll base). Then `continuum` says whether
  /// the constant lies in L Z, i.e. every eta is fixed.
  bool constant_shift = false;
  bool continuum = false;
  double shift = 0;
  double shift_spread = 0;
};

/// Roots of F_a' - L k for each k, bracketed on the grid and refined by
/// bisection with fresh first-return evaluations.
FixedPointSet fixed_points(const FinslerTable& ft, const Profile& p, double tol = 1e-10);

enum class Prop1Outcome { hypothesis_failed, found };
const char* to_string(Prop1Outcome o);

struct Prop1Result {
  Prop1Outcome outcome = Prop1Outcome::hypothesis_failed;
  double a = 0;           // wind actually searched (|a|)
  bool mirrored = false;  // a < 0: etas below refer to F_{|a|}; negate for F_a
  double int_F = 0;
  double bound = 0;       // (L/2)(1 + 1/(1 + a r_min)^2)
  double eta_bar = 0, F_bar = 0;
  double eta_hat = 0, tau_hat = 0;
  double g_hat = 0;              // F(eta_hat) / (1 - a r_min eta_hat)
  double Fa_prime_bar = 0;       // f(eta_bar) + a r_min tau(eta_bar)
  double ell0 = 0;               // L / (1 + a r_min)
  bool g_increasing = false;     // on the grid nodes in (eta_hat, eta_bar]
  bool conclusion_holds = false; // tau_hat < F_bar < ell0
};

/// Throws InvalidInput for a = 0 and NumericalFailure when the hypothesis
/// holds but no sign change of F_a' is found in [-1 + epsilon, eta_bar).
Prop1Result prop1_search(const FinslerTable& ft, const Profile& p, double tol = 1e-10);

/// Minimizer of F on [lo, hi]: grid scan, then golden section on the area
/// route. Ties go to the eta closest to 0.
std::pair<double, double> minimize_F(const GeneratingTable& t, const Profile& p, double lo,
                                     double hi);

}  // namespace systolic
