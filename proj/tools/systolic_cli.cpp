#include <CLI11.hpp>
#include <iostream>

#include "systolic/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Geodesic flows, generating functions and systolic ratios of spheres of revolution"};
  app.require_subcommand(1, 1);
  std::string config, out;
  for (const char* name : {"analyze", "geodesic", "gentable", "zoll-build", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory (overrides output.dir)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    systolic::RunConfig cfg = systolic::load_config(config);
    if (!out.empty()) cfg.out_dir = out;
    systolic::run_command(command, cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return systolic::exit_code(e);
  }
  return 0;
}
