#pragma once

// Areas and contact volumes.

#include "systolic/geodesic_flow.hpp"
#include "systolic/profile.hpp"
#include "systolic/return_map.hpp"

namespace systolic {

double riemannian_area(const Profile& p);

enum class VolumeMode {
  closed_beta,  // beta-integral in closed form, adaptive quadrature in s
  two_d,        // adaptive quadrature in both beta and s
};

/// Contact volume of the unit cotangent bundle of the Zermelo metric G_a.
double contact_volume_direct(const Profile& p, const NavigationParams& nav,
                             VolumeMode mode = VolumeMode::closed_beta);

/// a = 0 contact volume assembled from the generating function and the
/// Gamma integrals of the same profile.
double contact_volume_via_F(const Profile& p, const GeneratingTable& table);

/// 4 L int_0^1 F - 2 L^2, the part of the volume seen by the annulus.
double annulus_volume(const GeneratingTable& table);

double bh_area(const Profile& p, const NavigationParams& nav);
double ht_area(const Profile& p, const NavigationParams& nav);

/// pi (1 - a^2)^(-3/2): area of the polar of the unit disk translated by a.
double translated_disk_polar_area(double a);
/// The same area by quadrature of the chord length of the polar ellipse
/// (1 - a^2) p1^2 + p2^2 + 2 a p1 <= 1.
double polar_ellipse_area_quadrature(double a);

struct VolumeReport {
  double a = 0;
  double riemannian_area = 0;
  double contact_volume_direct = 0;       // at wind a
  double contact_volume_direct_a0 = 0;    // at a = 0
  double contact_volume_via_F = 0;        // a = 0
  double bh_area = 0;
  double ht_area = 0;
  double identity_defect = 0;   // |vol(0) - 2 pi area| / (2 pi area)
  double via_F_defect = 0;      // |via_F - vol(0)| / vol(0)
};

VolumeReport volume_report(const Profile& p, const NavigationParams& nav,
                           const GeneratingTable& table);

}  // namespace systolic
