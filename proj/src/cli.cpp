#include "systolic/cli.hpp"

#include <filesystem>
#include <mutex>

#include "systolic/error.hpp"
#include "systolic/parallel.hpp"

namespace systolic {

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& c, const std::string& name) {
  return (fs::path(c.out_dir) / name).string();
}

// "name.ext" for a single wind value, "name_<i>.ext" otherwise.
std::string indexed(const RunConfig& c, const std::string& stem, const std::string& ext,
                    std::size_t i) {
  if (c.a.size() == 1) return out_path(c, stem + ext);
  return out_path(c, stem + "_" + std::to_string(i) + ext);
}

ReportOptions report_options(const RunConfig& c) {
  ReportOptions o;
  o.grid = c.grid;
  o.zoll_tol = c.zoll_tol;
  o.tol = c.grid.integrator_tol;
  return o;
}

void check_winds(const Profile& p, const RunConfig& c) {
  for (double a : c.a) validate_wind(p, NavigationParams{a});
}

void analyze(const RunConfig& c, std::ostream& log) {
  const Profile p = build_profile(c);
  check_winds(p, c);
  const ReportOptions opt = report_options(c);
  const GeneratingTable table = build_generating_table(p, opt.grid);
  if (c.wants("csv")) write_gentable_csv(out_path(c, "gentable.csv"), table);
  for (std::size_t i = 0; i < c.a.size(); ++i) {
    const AnalysisReport R = systolic_report(p, NavigationParams{c.a[i]}, table, opt);
    if (c.wants("json")) write_json(indexed(c, "report", ".json", i), to_json(R));
    if (c.wants("csv")) write_finsler_csv(indexed(c, "finsler", ".csv", i), R.ftable);
    log << "a = " << format_number(R.a) << ": rho_bh = " << format_number(R.rho_bh)
        << ", rho_ht = " << format_number(R.rho_ht) << ", shortest = "
        << to_string(R.geodesics[R.shortest].source) << ", branch = " << R.certified_branch
        << '\n';
  }
}

void geodesic(const RunConfig& c, std::ostream& log) {
  if (!c.geodesic) throw InvalidInput("config: 'geodesic' block required for this command");
  const Profile p = build_profile(c);
  const NavigationParams nav{c.a.front()};
  validate_wind(p, nav);
  const GeodesicSpec& g = *c.geodesic;
  const Trajectory tr = integrate(g.start, p, nav, g.t_end, c.grid.integrator_tol);
  write_trajectory_csv(out_path(c, "trajectory.csv"), tr.sample(g.samples, p));
  log << "steps = " << tr.steps().size()
      << ", max Clairaut drift = " << format_number(tr.max_clairaut_drift()) << '\n';
}

void gentable(const RunConfig& c, std::ostream& log) {
  const Profile p = build_profile(c);
  check_winds(p, c);
  const GeneratingTable table = build_generating_table(p, c.grid);
  write_gentable_csv(out_path(c, "gentable.csv"), table);
  for (std::size_t i = 0; i < c.a.size(); ++i) {
    write_finsler_csv(indexed(c, "finsler", ".csv", i), build_finsler_table(table, c.a[i]));
  }
  log << "nodes = " << table.size() << ", max |F_flow - F_area| = "
      << format_number(table.max_discrepancy) << '\n';
}

void zoll_build(const RunConfig& c, std::ostream& log) {
  if (!c.z_plus) throw InvalidInput("config: 'z_plus' block required for zoll-build");
  const ZPlusSpec& z = *c.z_plus;
  const ZPlus zp = z.kind == "hemisphere" ? ZPlus::hemisphere(z.R)
                                          : ZPlus::bump(z.R, z.amplitude, z.width);
  const Profile p = darboux_zoll(zp);
  const std::string csv = out_path(c, "profile.csv");
  write_profile_csv(csv, p, z.samples - 1);

  const ReportOptions opt = report_options(c);
  const AnalysisReport R = systolic_report(p, NavigationParams{0.0}, opt);
  // The emitted samples must describe the same surface.
  const GeneratingTable back = build_generating_table(from_samples(read_samples_csv(csv)), opt.grid);
  double dF = 0.0;
  for (std::size_t j = 0; j < back.size(); ++j) dF = std::max(dF, std::abs(back.F[j] - R.table.F[j]));

  nlohmann::ordered_json cert;
  cert["z_plus"] = {{"kind", z.kind}, {"R", z.R}, {"amplitude", z.amplitude}, {"width", z.width}};
  cert["zoll"] = to_json(R.zoll);
  cert["L"] = R.table.L;
  cert["M"] = p.M();
  cert["riemannian_area"] = R.volumes.riemannian_area;
  cert["rho_bh"] = R.rho_bh;
  cert["round_trip_max_dF"] = dF;
  write_json(out_path(c, "zoll_certificate.json"), cert);
  log << "verdict = " << to_string(R.zoll.verdict) << ", max |F - L| = "
      << format_number(R.zoll.max_dev) << ", rho_bh = " << format_number(R.rho_bh) << '\n';
}

void sweep(const RunConfig& c, std::ostream& log) {
  const Profile p = build_profile(c);
  check_winds(p, c);
  ReportOptions opt = report_options(c);
  const GeneratingTable table = build_generating_table(p, opt.grid);
  std::vector<SweepRow> rows(c.a.size());
  opt.grid.threads = 1;  // parallel over a instead
  parallel_for(
      c.a.size(),
      [&](std::size_t i) {
        const AnalysisReport R = systolic_report(p, NavigationParams{c.a[i]}, table, opt);
        rows[i] = {c.a[i], R.rho_bh, R.rho_ht, R.ell_min_upper_bound};
      },
      c.grid.threads);
  write_sweep_csv(out_path(c, "sweep.csv"), rows);
  for (const auto& r : rows) {
    log << "a = " << format_number(r.a) << ": rho_bh = " << format_number(r.rho_bh)
        << ", rho_ht = " << format_number(r.rho_ht) << '\n';
  }
}

}  // namespace

void run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  using Fn = void (*)(const RunConfig&, std::ostream&);
  Fn fn = nullptr;
  if (command == "analyze") fn = analyze;
  else if (command == "geodesic") fn = geodesic;
  else if (command == "gentable") fn = gentable;
  else if (command == "zoll-build") fn = zoll_build;
  else if (command == "sweep") fn = sweep;
  else throw InvalidInput("unknown command '" + command + "'");
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw InvalidInput("cannot create output directory " + cfg.out_dir + ": " + ec.message());
  fn(cfg, log);
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const NumericalFailure*>(&e)) return 2;
  return 1;
}

}  // namespace systolic
