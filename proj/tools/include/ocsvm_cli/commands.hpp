#pragma once

#include <iosfwd>

#include "ocsvm_cli/config.hpp"

namespace ocsvm::cli {

// Executes one validated configuration. Artifacts land at their configured
// paths (relative ones under cfg.out_dir) and a one-screen summary goes to
// `out`. Throws the library error types on failure.
void run_command(const RunConfig& cfg, std::ostream& out);

// Full front end: parses argv, loads and validates the config, runs the
// command. Exit codes: 0 ok, 2 config error, 3 data error, 4 solver error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

} // namespace ocsvm::cli
