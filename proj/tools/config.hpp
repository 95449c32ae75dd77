#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "turbofade/density_evolution.hpp"
#include "turbofade/ensemble.hpp"
#include "turbofade/outage.hpp"
#include "turbofade/sim_harness.hpp"
#include "turbofade/turbo_codec.hpp"

namespace turbofade::cli {

/// Malformed or infeasible configuration (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProfileSpec {
  std::string id;
  std::vector<DegreeFraction> entries;
};

struct ExperimentConfig {
  // [run]
  uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "out";

  // [code]
  int info_bits = 6000;
  double rate = 0.5;
  double mother_rate = 0.5;
  int fading_blocks = 2;
  RscSpec rsc;
  uint64_t interleaver_seed = 1;
  MultiplexerKind multiplexer = MultiplexerKind::kDiagonal;

  // [profile], one per section; the first is the primary ensemble
  std::vector<ProfileSpec> profiles;

  DeConfig de;
  ThresholdSearch threshold;

  // [evolve]
  double evolve_ebn0_db = 1.0;
  std::vector<double> evolve_gains;  // empty: AWGN graph
  // [boundary]
  std::vector<double> boundary_ebn0_db = {8.0};
  int boundary_rays = 17;
  double boundary_rel_tol = 0.01;
  // [outage]
  std::vector<double> outage_ebn0_db;
  long long outage_samples = 1000000;
  // [pdeo]
  std::vector<double> pdeo_ebn0_db = {8.0};
  PdeoOptions pdeo;
  // [simulate]
  ChannelMode sim_channel = ChannelMode::kBlockFading;
  std::vector<double> sim_ebn0_db;
  SimOptions sim;
  // [audit]
  int audit_trials = 200;
  DecodeOptions audit_decode;

  std::string source_text;  // verbatim file contents, for hashing

  DegreeProfile profile(std::size_t k = 0) const;
  CodeConfig code_config(std::size_t k = 0) const;
};

/// Parses the sectioned key-value format. Unknown sections or keys,
/// malformed values, and infeasible ensembles raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Accepts "a, b, c" and "start:step:stop" (inclusive).
std::vector<double> parse_grid(const std::string& text);

/// 64-bit FNV-1a of a byte string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace turbofade::cli
