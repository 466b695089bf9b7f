#include "systolic/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "systolic/error.hpp"
#include "systolic/quadrature.hpp"

namespace systolic {

namespace {

constexpr double kPi = std::numbers::pi;

// Piecewise adaptive quadrature over [0, M/2] split on the profile's sample
// grid (coarsened), so that table-based profiles are integrated panel-wise.
template <class G>
double integrate_s(const Profile& p, G&& g, double rel_tol) {
  const auto& grid = p.sample_grid();
  const std::size_t stride = std::max<std::size_t>(1, grid.size() / 64);
  std::vector<double> cuts;
  for (std::size_t i = 0; i < grid.size(); i += stride) cuts.push_back(grid[i]);
  if (cuts.back() != grid.back()) cuts.push_back(grid.back());
  double total = 0.0;
  const double scale = p.half_length() * std::max(1.0, p.r_max());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    auto r = quad::adaptive(g, cuts[k], cuts[k + 1], 1e-3 * rel_tol * scale / cuts.size(), rel_tol,
                            2000);
    if (!r.converged) throw NumericalFailure("area quadrature did not converge");
    total += r.value;
  }
  return total;
}

}  // namespace

double riemannian_area(const Profile& p) {
  return 2 * kPi * integrate_s(p, [&](double s) { return p.r(s); }, 1e-13);
}

double contact_volume_direct(const Profile& p, const NavigationParams& nav, VolumeMode mode) {
  validate_wind(p, nav);
  const double a = nav.a;
  if (mode == VolumeMode::closed_beta) {
    // integral over beta in [0, 2 pi] of (1 + c cos beta)^-2 = 2 pi (1 - c^2)^(-3/2)
    return 4 * kPi * kPi * integrate_s(
                               p,
                               [&](double s) {
                                 const double r = p.r(s);
                                 const double q = 1.0 - a * a * r * r;
                                 return r / (q * std::sqrt(q));
                               },
                               1e-13);
  }
  return 2 * kPi * integrate_s(
                       p,
                       [&](double s) {
                         const double r = p.r(s);
                         const double c = a * r;
                         auto inner = quad::adaptive(
                             [&](double b) {
                               const double d = 1.0 + c * std::cos(b);
                               return r / (d * d);
                             },
                             0.0, 2 * kPi, 1e-13 * std::max(1e-3, r), 0.0, 500);
                         return inner.value;
                       },
                       1e-12);
}

double annulus_volume(const GeneratingTable& t) {
  return 4 * t.L * t.int_F_0_1 - 2 * t.L * t.L;
}

double contact_volume_via_F(const Profile& p, const GeneratingTable& t) {
  const MinimalEquator me = p.minimal_equator();
  if (std::abs(me.L - t.L) > 1e-12 * me.L || std::abs(p.M() - t.M) > 1e-12 * p.M()) {
    throw InvalidInput("contact_volume_via_F: table was built for a different profile");
  }
  return annulus_volume(t) + 4 * kPi * t.gamma.r_part - 2 * t.L * t.gamma.cos_part;
}

double bh_area(const Profile& p, const NavigationParams& nav) {
  validate_wind(p, nav);
  return riemannian_area(p);
}

double ht_area(const Profile& p, const NavigationParams& nav) {
  return contact_volume_direct(p, nav) / (2 * kPi);
}

double translated_disk_polar_area(double a) {
  if (!(std::abs(a) < 1.0)) throw InvalidInput("polar area: need |a| < 1");
  const double q = 1.0 - a * a;
  return kPi / (q * std::sqrt(q));
}

double polar_ellipse_area_quadrature(double a) {
  if (!(std::abs(a) < 1.0)) throw InvalidInput("polar area: need |a| < 1");
  const double q = 1.0 - a * a;
  // chord 2 sqrt(1 - 2 a p1 - q p1^2) on p1 in [-1/(1-a), 1/(1+a)]
  auto r = quad::sqrt_endpoints(
      [&](double x) { return 2.0 * std::sqrt(std::max(0.0, 1.0 - 2 * a * x - q * x * x)); },
      -1.0 / (1.0 - a), 1.0 / (1.0 + a), 1e-14, 1e-15);
  return r.value;
}

VolumeReport volume_report(const Profile& p, const NavigationParams& nav,
                           const GeneratingTable& table) {
  VolumeReport v;
  v.a = nav.a;
  v.riemannian_area = riemannian_area(p);
  v.contact_volume_direct = contact_volume_direct(p, nav);
  v.contact_volume_direct_a0 =
      nav.a == 0.0 ? v.contact_volume_direct : contact_volume_direct(p, NavigationParams{0.0});
  v.contact_volume_via_F = contact_volume_via_F(p, table);
  v.bh_area = v.riemannian_area;
  v.ht_area = v.contact_volume_direct / (2 * kPi);
  v.identity_defect = std::abs(v.contact_volume_direct_a0 - 2 * kPi * v.riemannian_area) /
                      (2 * kPi * v.riemannian_area);
  v.via_F_defect =
      std::abs(v.contact_volume_via_F - v.contact_volume_direct_a0) / v.contact_volume_direct_a0;
  return v;
}

}  // namespace systolic
