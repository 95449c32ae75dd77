#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "turbofade/ensemble.hpp"
#include "turbofade/llr_density.hpp"
#include "turbofade/rsc_trellis.hpp"

namespace turbofade {

struct DeConfig {
  LlrGrid grid{40.0, 4096};
  int window = 10000;          // W, trellis steps per sampled window
  int guard = 1000;            // G, steps discarded at each window edge
  long long samples = 1000000; // S, harvested extrinsics per window type and iteration
  int max_iters = 300;
  double target = 1e-6;        // convergence: P_b below this
  int stall_window = 20;
  double stall_improvement = 1e-3;
  int workers = 1;

  void validate() const;
};

/// Trellis slot: which edge type feeds it and where its parity goes (-1 = punctured).
struct SlotKind {
  int edge_type = 0;
  int parity_block = -1;
};

/// Window of one trellis region. Slots alternate between `on` and `off`
/// kinds with the `on` kind occupying a fraction `on_rate` of positions,
/// spread evenly (random phase per sampled window).
struct WindowType {
  std::string name;
  SlotKind on;
  SlotKind off;
  double on_rate = 0.0;
};

/// Bits of one class: observed on `channel_block`, with edges[t] edges of type t.
struct BitType {
  std::string label;
  double weight = 0.0;  // node fraction
  int channel_block = 0;
  std::vector<int> edges;
};

/// Ensemble description for DE: which extrinsic message types exist, how
/// bits attach to them, and which trellis windows produce them.
struct DeGraph {
  int edge_types = 1;
  std::vector<BitType> bits;
  std::vector<WindowType> windows;

  void validate() const;
  int max_edges_per_bit() const;
};

/// Unstructured punctured ensemble on one channel: a single edge type and a
/// window transmitting a fraction (1 - f_p) of the parity bits.
DeGraph awgn_graph(const DegreeProfile& profile, double punctured_fraction);

/// Ensemble seen through the two-block h-pi-diagonal multiplexer (R_c = 1/2,
/// rho_0 = 1/2): block-2 bits are degree 2 with one copy on a transmitted
/// parity slot after RSC 1; block-1 bits carry the rest of the profile.
DeGraph multiplexed_graph(const DegreeProfile& profile);

struct DeChannel {
  std::vector<double> gains;  // per block
  double noise_var = 1.0;
};

/// Consistent Gaussian channel message density N(2a^2/s2, 4a^2/s2); delta(0) for a = 0.
LlrDensity density_from_channel(const LlrGrid& grid, double alpha, double noise_var);

/// Monte Carlo windowed-BCJR estimate of the extrinsic densities produced by
/// one window type. Returns one density per edge type used by the window
/// (index by edge type; unused types are left default constructed).
std::vector<LlrDensity> checknode_transfer(const Trellis& trellis, const WindowType& window,
                                           std::span<const LlrDensity> apriori,
                                           const DeChannel& channel, const DeConfig& config,
                                           uint64_t seed);

enum class DeVerdict { kConverged, kStalled, kMaxIterations };

struct DeIterate {
  int iteration = 0;
  double error_probability = 0.0;      // P_b(i)
  std::vector<double> per_bit_type;    // P_b(d, i)
};

struct DeTrajectory {
  std::vector<std::string> labels;
  std::vector<DeIterate> iterates;
  DeVerdict verdict = DeVerdict::kMaxIterations;
  double max_mass_drift = 0.0;

  bool converged() const { return verdict == DeVerdict::kConverged; }
  int iterations() const { return iterates.empty() ? 0 : iterates.back().iteration; }
};

DeTrajectory evolve(const Trellis& trellis, const DeGraph& graph, const DeChannel& channel,
                    const DeConfig& config, uint64_t seed);

void write_trajectory_csv(std::ostream& os, const DeTrajectory& t);

struct ThresholdSearch {
  double lo_db = 0.0;
  double hi_db = 1.5;
  double precision_db = 0.02;
  double max_hi_db = 6.0;
};

struct ThresholdProbe {
  double ebn0_db;
  bool converged;
  int iterations;
};

struct ThresholdResult {
  double threshold_db = 0.0;
  double lo_db = 0.0;  // highest probe that failed
  double hi_db = 0.0;  // lowest probe that converged
  std::vector<ThresholdProbe> probes;
};

/// Bisection on Eb/N0 of the AWGN verdict with common random numbers.
/// Throws std::runtime_error when the verdict is non-monotone across the bracket.
ThresholdResult find_threshold(const Trellis& trellis, const DeGraph& graph, double rate,
                               const DeConfig& config, uint64_t seed, const ThresholdSearch& search = {});

/// 1 when DE over the multiplexed ensemble fails to drive P_b below target.
int deo_indicator(const Trellis& trellis, const DeGraph& graph, double alpha1, double alpha2,
                  double ebn0_db, double rate, const DeConfig& config, uint64_t seed);

}  // namespace turbofade
