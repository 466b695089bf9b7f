#pragma once

// Closed geodesics, systolic ratios, the Zoll test, and the ledger of
// inequalities that certify rho_BH <= pi on a given surface.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "systolic/finsler.hpp"
#include "systolic/geodesic_flow.hpp"
#include "systolic/measures.hpp"
#include "systolic/profile.hpp"
#include "systolic/return_map.hpp"

namespace systolic {

enum class GeodesicSource { equator_with_wind, equator_against_wind, meridian, annulus_fixed_point };
const char* to_string(GeodesicSource s);

struct ClosedGeodesicRecord {
  GeodesicSource source = GeodesicSource::meridian;
  double eta = 0;     // NaN unless annulus_fixed_point
  double s_c = 0;     // NaN unless equator
  long k = 0;         // F_a'(eta) = L k for fixed points
  double length = 0;  // G_a-length
  double a = 0;
};

/// Equators (both orientations) of length 2 pi r / (1 +- |a| r), meridians
/// of length M when a = 0, and annulus fixed points of length tau(eta).
/// At a = 0 the eta = 0 fixed point is the meridian and is not repeated.
std::vector<ClosedGeodesicRecord> closed_geodesics(const Profile& p, const NavigationParams& nav,
                                                   const FinslerTable& ft,
                                                   FixedPointSet* fixed_out = nullptr,
                                                   double tol = 1e-10);

enum class ZollVerdict { zoll, not_zoll, inconclusive };
const char* to_string(ZollVerdict v);

struct ZollReport {
  ZollVerdict verdict = ZollVerdict::inconclusive;
  double max_dev = 0;     // max node |F - L|
  double tol = 0;         // absolute
  double noise = 0;       // max node |F_flow - F_area|
  double curvature_rel_error = 0;  // |r''(s0) r(s0) + 1|
  bool curvature_ok = false;       // <= 1e-3
  bool unique_equator = false;
  bool nondegenerate_max = false;
};

/// tol_rel is relative to L.
ZollReport zoll_check(const Profile& p, const GeneratingTable& t, double tol_rel = 1e-4);

struct LedgerEntry {
  std::string name;
  std::string relation;  // "<=", "<", ">=", "="
  double lhs = 0, rhs = 0;
  bool applicable = true;
  bool holds = false;
  // Required entries hold on every valid surface; the others decide which
  // branch of the argument applies.
  bool required = true;
  std::string note;
};

struct ReportOptions {
  GridSpec grid;
  double zoll_tol = 1e-4;
  double tol = 1e-10;  // first-return refinements
};

struct AnalysisReport {
  Profile profile;
  double a = 0;
  VolumeReport volumes;
  GeneratingTable table;  // a = 0
  FinslerTable ftable;    // wind a
  FixedPointSet fixed;
  std::vector<ClosedGeodesicRecord> geodesics;
  std::size_t shortest = 0;  // index into geodesics
  double ell_min_upper_bound = 0;
  double rho_bh = 0, rho_ht = 0;
  double rho_bh_equator_only = 0;
  double mu = 0, eta_mu = 0;  // min of F on [0, 1]
  ZollReport zoll;
  std::optional<Prop1Result> prop1;
  std::vector<LedgerEntry> ledger;
  std::string certified_branch;
};

AnalysisReport systolic_report(const Profile& p, const NavigationParams& nav,
                               const ReportOptions& opt = {});
/// Same, reusing an a = 0 table of p (sweeps over a).
AnalysisReport systolic_report(const Profile& p, const NavigationParams& nav,
                               const GeneratingTable& table, const ReportOptions& opt = {});

}  // namespace systolic
