#pragma once

#include <iosfwd>
#include <string>

#include "run_config.hpp"

namespace holonet::cli {

// Process exit codes.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

// Runs the validated command of `config`, writing artifacts and the echoed
// config under run.output. Returns 0 or kExitCheckFailed; library errors
// propagate as exceptions.
int run_command(const RunConfig& config, std::ostream& out);

// Full command-line entry point: parses argv, applies overrides
// (config file < --set/--graph < HOLONET_OUT_DIR < --out), and maps errors to
// exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace holonet::cli
