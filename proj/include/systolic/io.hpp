#pragma once

// CSV and JSON emission, and the JSON run configuration.

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "systolic/finsler.hpp"
#include "systolic/geodesic_flow.hpp"
#include "systolic/profile.hpp"
#include "systolic/return_map.hpp"
#include "systolic/systole.hpp"

namespace systolic {

/// %.17g, with "nan" / "inf" spelled out.
std::string format_number(double x);

void write_gentable_csv(const std::string& path, const GeneratingTable& t);
void write_finsler_csv(const std::string& path, const FinslerTable& ft);
void write_trajectory_csv(const std::string& path, const std::vector<Trajectory::Sample>& samples);
/// n + 1 equally spaced samples of the whole meridian, s in [0, M/2].
void write_profile_csv(const std::string& path, const Profile& p, std::size_t n);

struct SweepRow {
  double a, rho_bh, rho_ht, ell_upper;
};
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

nlohmann::ordered_json to_json(const ZollReport& z);
nlohmann::ordered_json to_json(const AnalysisReport& r);
void write_json(const std::string& path, const nlohmann::ordered_json& j);

struct GeodesicSpec {
  UnitTangentState start;
  double t_end = 50.0;
  std::size_t samples = 1000;
};

struct ZPlusSpec {
  std::string kind = "hemisphere";  // or "bump"
  double R = 1.0, amplitude = 0.0, width = 0.5;
  std::size_t samples = 2001;       // profile CSV resolution
};

struct RunConfig {
  std::string family;                  // empty when samples_path is set
  std::map<std::string, double> params;
  std::string samples_path;            // resolved against the config directory
  std::vector<double> a{0.0};
  GridSpec grid;
  double zoll_tol = 1e-4;
  std::string out_dir = "out";
  std::vector<std::string> formats{"json", "csv"};
  std::optional<GeodesicSpec> geodesic;
  std::optional<ZPlusSpec> z_plus;

  bool wants(const std::string& fmt) const;
};

/// Throws InvalidInput on anything malformed. base_dir resolves relative paths.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

Profile build_profile(const RunConfig& c);

}  // namespace systolic
