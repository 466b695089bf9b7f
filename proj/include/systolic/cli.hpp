#pragma once

#include <ostream>
#include <string>

#include "systolic/io.hpp"

namespace systolic {

/// analyze | geodesic | gentable | zoll-build | sweep. Writes artifacts into
/// cfg.out_dir and a short summary to log. Errors propagate as InvalidInput
/// (exit 1) or NumericalFailure (exit 2); see exit_code.
void run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

/// Maps an exception from run_command or load_config to the process status.
int exit_code(const std::exception& e);

}  // namespace systolic
