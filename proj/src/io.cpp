#include "systolic/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "systolic/error.hpp"

namespace systolic {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

void finish(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
}

template <class... T>
void row(std::ostream& os, const T&... v) {
  bool first = true;
  auto one = [&](const auto& x) {
    if (!first) os << ',';
    first = false;
    if constexpr (std::is_arithmetic_v<std::decay_t<decltype(x)>>) {
      os << format_number(static_cast<double>(x));
    } else {
      os << x;
    }
  };
  (one(v), ...);
  os << '\n';
}

}  // namespace

void write_gentable_csv(const std::string& path, const GeneratingTable& t) {
  auto os = open_out(path);
  os << "eta,F,f,tau,W,method\n";
  for (std::size_t j = 0; j < t.size(); ++j) {
    row(os, t.eta[j], t.F[j], t.f[j], t.tau[j], t.W[j], to_string(t.method[j]));
  }
  finish(os, path);
}

void write_finsler_csv(const std::string& path, const FinslerTable& ft) {
  auto os = open_out(path);
  os << "eta,F,T,Fa,Fa_prime,tau\n";
  const auto& t = ft.base;
  for (std::size_t j = 0; j < t.size(); ++j) {
    row(os, t.eta[j], t.F[j], ft.T[j], ft.Fa[j], ft.Fa_prime[j], t.tau[j]);
  }
  finish(os, path);
}

void write_trajectory_csv(const std::string& path, const std::vector<Trajectory::Sample>& samples) {
  auto os = open_out(path);
  os << "t,theta,beta,s,K\n";
  for (const auto& x : samples) row(os, x.t, x.theta, x.beta, x.s, x.K);
  finish(os, path);
}

void write_profile_csv(const std::string& path, const Profile& p, std::size_t n) {
  if (n < 2) throw InvalidInput("profile csv: need at least 2 intervals");
  auto os = open_out(path);
  os << "s,r,z\n";
  const double half = p.half_length();
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = i == n ? half : half * static_cast<double>(i) / static_cast<double>(n);
    // r is exactly 0 on the axis
    const double r = (i == 0 || i == n) ? 0.0 : p.r(s);
    row(os, s, r, p.z(s));
  }
  finish(os, path);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  auto os = open_out(path);
  os << "a,rho_bh,rho_ht,ell_upper\n";
  for (const auto& r : rows) row(os, r.a, r.rho_bh, r.rho_ht, r.ell_upper);
  finish(os, path);
}

ordered_json to_json(const ZollReport& z) {
  ordered_json j;
  j["verdict"] = to_string(z.verdict);
  j["max_abs_F_minus_L"] = z.max_dev;
  j["tolerance"] = z.tol;
  j["noise_floor"] = z.noise;
  j["curvature_check"] = {{"relative_error", z.curvature_rel_error}, {"passes", z.curvature_ok}};
  j["unique_equator"] = z.unique_equator;
  j["nondegenerate_maximum"] = z.nondegenerate_max;
  return j;
}

ordered_json to_json(const AnalysisReport& r) {
  const Profile& p = r.profile;
  const GeneratingTable& t = r.table;
  ordered_json out;

  ordered_json prof;
  prof["family"] = p.family();
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : p.params()) params[k] = v;
  prof["params"] = params;
  prof["M"] = p.M();
  prof["L"] = t.L;
  prof["r_min"] = t.r_min;
  prof["s0"] = t.s0;
  prof["r_max"] = p.r_max();
  ordered_json eqs = ordered_json::array();
  for (const auto& e : p.equators()) {
    eqs.push_back({{"s_c", e.s_c}, {"radius", e.radius}, {"kind", to_string(e.kind)}});
  }
  prof["equators"] = eqs;
  prof["warnings"] = p.warnings();
  prof["a"] = r.a;
  out["profile"] = prof;

  const VolumeReport& v = r.volumes;
  out["volumes"] = {{"riemannian_area", v.riemannian_area},
                    {"contact_volume_direct", v.contact_volume_direct},
                    {"contact_volume_direct_a0", v.contact_volume_direct_a0},
                    {"contact_volume_via_F", v.contact_volume_via_F},
                    {"bh_area", v.bh_area},
                    {"ht_area", v.ht_area},
                    {"identity_defect", v.identity_defect},
                    {"via_F_defect", v.via_F_defect}};

  ordered_json recs = ordered_json::array();
  for (const auto& g : r.geodesics) {
    ordered_json x;
    x["source"] = to_string(g.source);
    x["eta"] = g.eta;
    x["s_c"] = g.s_c;
    x["k"] = g.k;
    x["length"] = g.length;
    x["a"] = g.a;
    recs.push_back(x);
  }
  ordered_json geo;
  geo["records"] = recs;
  geo["shortest"] = r.shortest;
  geo["rho_bh_equator_only"] = r.rho_bh_equator_only;
  geo["fixed_points"] = {{"count", r.fixed.points.size()},
                         {"constant_shift", r.fixed.constant_shift},
                         {"continuum", r.fixed.continuum},
                         {"shift", r.fixed.shift}};
  out["geodesics"] = geo;
  out["ell_min_upper_bound"] = r.ell_min_upper_bound;
  out["rho_bh"] = r.rho_bh;
  out["rho_ht"] = r.rho_ht;
  out["zoll"] = to_json(r.zoll);

  ordered_json led;
  led["certified_branch"] = r.certified_branch;
  led["mu"] = r.mu;
  led["eta_mu"] = r.eta_mu;
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.ledger) {
    ordered_json x;
    x["name"] = e.name;
    x["lhs"] = e.lhs;
    x["relation"] = e.relation;
    x["rhs"] = e.rhs;
    x["applicable"] = e.applicable;
    x["required"] = e.required;
    x["holds"] = e.holds;
    x["note"] = e.note;
    entries.push_back(x);
  }
  led["entries"] = entries;
  if (r.prop1) {
    const Prop1Result& P = *r.prop1;
    ordered_json x;
    x["outcome"] = to_string(P.outcome);
    x["a"] = P.a;
    x["mirrored"] = P.mirrored;
    x["int_F"] = P.int_F;
    x["bound"] = P.bound;
    if (P.outcome == Prop1Outcome::found) {
      x["eta_bar"] = P.eta_bar;
      x["F_bar"] = P.F_bar;
      x["eta_hat"] = P.eta_hat;
      x["tau_hat"] = P.tau_hat;
      x["g_hat"] = P.g_hat;
      x["ell0"] = P.ell0;
      x["g_increasing"] = P.g_increasing;
      x["conclusion_holds"] = P.conclusion_holds;
    }
    led["prop1"] = x;
  } else {
    led["prop1"] = nullptr;
  }
  out["ledger"] = led;

  out["tables"] = {{"generating",
                    {{"nodes", t.size()},
                     {"epsilon", t.spec.epsilon},
                     {"max_discrepancy", t.max_discrepancy},
                     {"worst_eta", t.eta[t.worst_node]},
                     {"int_F_0_1", t.int_F_0_1},
                     {"F_end", t.F_end},
                     {"gamma_cos", t.gamma.cos_part},
                     {"gamma_r", t.gamma.r_part},
                     {"parity_defect_F", t.parity_defect_F()},
                     {"consistency_defect", t.consistency_defect()}}},
                   {"finsler",
                    {{"a", r.ftable.a},
                     {"max_T_disagreement", r.ftable.max_T_disagreement},
                     {"Fa_minus", r.ftable.Fa_minus},
                     {"Fa_plus", r.ftable.Fa_plus}}}};
  return out;
}

void write_json(const std::string& path, const ordered_json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
  finish(os, path);
}

bool RunConfig::wants(const std::string& fmt) const {
  for (const auto& f : formats) {
    if (f == fmt) return true;
  }
  return false;
}

namespace {

double num(const json& j, const char* key, double def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) throw InvalidInput(std::string("config: '") + key + "' must be a number");
  return j[key].get<double>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw InvalidInput(std::string("config: unknown key '") + it.key() + "' in " + where);
    }
  }
}

}  // namespace

RunConfig parse_config(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw InvalidInput("config: top level must be an object");
  check_keys(j, {"profile", "a", "grid", "tolerances", "output", "geodesic", "z_plus", "threads"},
             "top level");
  RunConfig c;

  if (j.contains("profile")) {
    const json& p = j["profile"];
    check_keys(p, {"family", "params", "samples"}, "profile");
    if (p.contains("samples")) {
      std::filesystem::path sp = p["samples"].get<std::string>();
      if (sp.is_relative()) sp = std::filesystem::path(base_dir) / sp;
      c.samples_path = sp.string();
    } else if (p.contains("family")) {
      c.family = p["family"].get<std::string>();
      if (p.contains("params")) {
        for (auto it = p["params"].begin(); it != p["params"].end(); ++it) {
          if (!it->is_number()) throw InvalidInput("config: profile param '" + it.key() + "' must be a number");
          c.params[it.key()] = it->get<double>();
        }
      }
    } else {
      throw InvalidInput("config: profile needs 'family' or 'samples'");
    }
  }

  if (j.contains("a")) {
    c.a.clear();
    if (j["a"].is_number()) {
      c.a.push_back(j["a"].get<double>());
    } else if (j["a"].is_array()) {
      for (const auto& x : j["a"]) {
        if (!x.is_number()) throw InvalidInput("config: 'a' entries must be numbers");
        c.a.push_back(x.get<double>());
      }
    } else {
      throw InvalidInput("config: 'a' must be a number or a list");
    }
    if (c.a.empty()) throw InvalidInput("config: 'a' list is empty");
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, {"nodes", "epsilon"}, "grid");
    const double n = num(g, "nodes", 201);
    if (!(n >= 21) || n != std::floor(n) || static_cast<long>(n) % 2 == 0) {
      throw InvalidInput("config: grid.nodes must be an odd integer >= 21");
    }
    c.grid.nodes = static_cast<std::size_t>(n);
    c.grid.epsilon = num(g, "epsilon", c.grid.epsilon);
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    check_keys(t, {"integrator", "quadrature", "area", "crosscheck", "zoll"}, "tolerances");
    c.grid.integrator_tol = num(t, "integrator", c.grid.integrator_tol);
    c.grid.quad_tol = num(t, "quadrature", c.grid.quad_tol);
    c.grid.area_tol = num(t, "area", c.grid.area_tol);
    c.grid.crosscheck_tol = num(t, "crosscheck", c.grid.crosscheck_tol);
    c.zoll_tol = num(t, "zoll", c.zoll_tol);
    for (double x : {c.grid.integrator_tol, c.grid.quad_tol, c.grid.area_tol, c.grid.crosscheck_tol,
                     c.zoll_tol}) {
      if (!(x > 0)) throw InvalidInput("config: tolerances must be positive");
    }
  }
  if (j.contains("threads")) {
    const double n = num(j, "threads", 0);
    if (!(n >= 0)) throw InvalidInput("config: threads must be >= 0");
    c.grid.threads = static_cast<std::size_t>(n);
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, {"dir", "formats"}, "output");
    if (o.contains("dir")) {
      std::filesystem::path d = o["dir"].get<std::string>();
      if (d.is_relative()) d = std::filesystem::path(base_dir) / d;
      c.out_dir = d.string();
    }
    if (o.contains("formats")) {
      c.formats = o["formats"].get<std::vector<std::string>>();
      for (const auto& f : c.formats) {
        if (f != "json" && f != "csv") throw InvalidInput("config: unknown output format '" + f + "'");
      }
    }
  } else {
    c.out_dir = (std::filesystem::path(base_dir) / "out").string();
  }
  if (j.contains("geodesic")) {
    const json& g = j["geodesic"];
    check_keys(g, {"theta", "beta", "s", "t_end", "samples"}, "geodesic");
    GeodesicSpec gs;
    gs.start.theta = num(g, "theta", 0.0);
    gs.start.beta = num(g, "beta", 0.0);
    if (!g.contains("s")) throw InvalidInput("config: geodesic.s is required");
    gs.start.s = num(g, "s", 0.0);
    gs.t_end = num(g, "t_end", gs.t_end);
    if (!(gs.t_end > 0)) throw InvalidInput("config: geodesic.t_end must be positive");
    const double n = num(g, "samples", 1000);
    if (!(n >= 1)) throw InvalidInput("config: geodesic.samples must be >= 1");
    gs.samples = static_cast<std::size_t>(n);
    c.geodesic = gs;
  }
  if (j.contains("z_plus")) {
    const json& z = j["z_plus"];
    check_keys(z, {"kind", "R", "amplitude", "width", "samples"}, "z_plus");
    ZPlusSpec zs;
    if (z.contains("kind")) zs.kind = z["kind"].get<std::string>();
    if (zs.kind != "hemisphere" && zs.kind != "bump") {
      throw InvalidInput("config: z_plus.kind must be 'hemisphere' or 'bump'");
    }
    zs.R = num(z, "R", zs.R);
    zs.amplitude = num(z, "amplitude", zs.amplitude);
    zs.width = num(z, "width", zs.width);
    const double n = num(z, "samples", 2001);
    if (!(n >= 16)) throw InvalidInput("config: z_plus.samples must be >= 16");
    zs.samples = static_cast<std::size_t>(n);
    c.z_plus = zs;
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot read config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config parse error: ") + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  try {
    return parse_config(j, dir.empty() ? "." : dir.string());
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
}

Profile build_profile(const RunConfig& c) {
  if (!c.samples_path.empty()) return from_samples(read_samples_csv(c.samples_path));
  if (c.family.empty()) throw InvalidInput("config: no profile given");
  return from_family(c.family, c.params);
}

}  // namespace systolic
