#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "turbofade/turbo_codec.hpp"

namespace turbofade {

enum class ChannelMode {
  kAwgn,         // alpha = (1, 1) on every frame
  kBlockFading,  // fresh Rayleigh pair per frame
};

struct StopRule {
  long long min_word_errors = 100;
  long long max_frames = 1000000;
};

struct SimPoint {
  double ebn0_db = 0.0;
  long long frames = 0;
  long long word_errors = 0;
  long long bit_errors = 0;
  double wer = 0.0;
  double ber = 0.0;
  double wer_lower = 0.0;  // 95% Wilson interval
  double wer_upper = 0.0;
  double mean_iterations = 0.0;
  double wall_seconds = 0.0;
  uint64_t seed = 0;
};

struct SimResult {
  ChannelMode mode = ChannelMode::kBlockFading;
  std::vector<SimPoint> points;
};

struct SimOptions {
  StopRule stop;
  DecodeOptions decode;
  int workers = 1;
  /// Stop the sweep after the first point whose WER is at or below this (0 disables).
  double stop_below_wer = 0.0;
};

/// Outcome of one simulated frame.
struct FrameOutcome {
  int bit_errors = 0;
  int iterations = 0;
};

/// Simulates frame `frame` of a point seeded with `point_seed`; replayable in isolation.
FrameOutcome simulate_frame(const CodeInstance& code, ChannelMode mode, double ebn0_db, uint64_t point_seed,
                            uint64_t frame, const DecodeOptions& decode);

/// Frames run in index order until the stop rule triggers; parallel batches
/// are truncated at the same frame a sequential run would stop at.
SimPoint run_wer_point(const CodeInstance& code, ChannelMode mode, double ebn0_db, uint64_t point_seed,
                       const SimOptions& options);

SimResult run_wer_sweep(const CodeInstance& code, ChannelMode mode, std::span<const double> ebn0_db,
                        uint64_t seed, const SimOptions& options = {});

/// Seed used for the point at `ebn0_db` of a sweep seeded with `seed`.
uint64_t point_seed(uint64_t seed, double ebn0_db);

struct ErasureFailure {
  int trial;
  int erased_block;
  int bit_errors;
  int iterations;
  uint64_t seed;
};

struct ErasureAuditReport {
  int trials = 0;
  int failures[2] = {0, 0};  // indexed by erased block
  std::vector<ErasureFailure> dumps;

  bool passed() const { return failures[0] == 0 && failures[1] == 0; }
};

/// For every trial and both orientations: erase one block (LLR 0) and
/// observe the other noiselessly (saturated LLRs), then decode.
ErasureAuditReport run_erasure_audit(const CodeInstance& code, int trials, uint64_t seed,
                                     const DecodeOptions& decode = {}, int workers = 1);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// CSV with '#'-prefixed metadata lines followed by one row per point (no wall time).
void write_sim_csv(std::ostream& os, const SimResult& r, const Metadata& meta);

}  // namespace turbofade
