#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace turbofade::cli;

int main(int argc, char** argv) {
  CLI::App app{"turbofade: irregular turbo codes over block-fading channels"};
  app.require_subcommand(1, 1);

  std::string config_path;
  RunOptions opts;
  uint64_t seed = 0;
  int workers = 0;
  std::string out_dir;

  const char* names[][2] = {
      {"params", "print derived code parameters"},
      {"threshold", "AWGN density-evolution threshold of every profile"},
      {"evolve", "one density-evolution trajectory"},
      {"boundary", "information-outage and DEO boundaries on a fan of rays"},
      {"pdeo", "Monte Carlo DEO probability using a boundary cache"},
      {"outage", "BPSK outage probability versus Eb/N0"},
      {"simulate", "Monte Carlo word error rate of a concrete code"},
      {"audit", "single-block erasure audit of the multiplexer"},
  };
  for (const auto& [name, help] : names) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed, "master seed (overrides [run] seed)");
    sub->add_option("--workers", workers, "worker threads (overrides [run] workers)");
    sub->add_option("--out", out_dir, "output directory (overrides [run] out)");
    sub->add_flag("--dry-run", opts.dry_run, "validate the config and print derived parameters only");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--workers")) opts.workers = workers;
  if (sub->count("--out")) opts.out_dir = out_dir;

  ExperimentConfig config;
  try {
    config = apply_overrides(load_config(config_path), opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    run_command(command, config, opts.dry_run, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}
