#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace turbofade::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kRuntimeFailure = 3 };

struct RunOptions {
  std::optional<uint64_t> seed;  // overrides [run] seed
  std::optional<int> workers;    // overrides [run] workers
  std::optional<std::string> out_dir;
  bool dry_run = false;
};

/// Applies command-line overrides to a parsed config.
ExperimentConfig apply_overrides(ExperimentConfig config, const RunOptions& options);

/// Prints the derived code parameters for every profile.
void print_params(std::ostream& os, const ExperimentConfig& config);

/// True when `name` is one of the subcommands below.
bool is_command(const std::string& name);

/// Runs a subcommand, writing CSV and JSON outputs under the output
/// directory and a short summary to `log`. Throws ConfigError or
/// std::exception; main() maps them to exit codes.
void run_command(const std::string& name, const ExperimentConfig& config, bool dry_run, std::ostream& log);

}  // namespace turbofade::cli
