#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace turbofade {

/// Saturation applied to every LLR entering or leaving the BCJR kernel.
inline constexpr double kLlrCap = 50.0;

/// Rate-1/2 recursive systematic convolutional code.
///
/// Octal generators use the "MSB is the constant term" convention:
/// (13)_8 = 1011b is 1 + D^2 + D^3 and (15)_8 = 1101b is 1 + D + D^3.
struct RscSpec {
  unsigned feedback_octal = 013;
  unsigned feedforward_octal = 015;
  int memory = 3;

  /// Validates the polynomials; throws std::invalid_argument.
  void validate() const;
};

/// Parses an octal literal such as "13" into its integer value.
unsigned parse_octal(const char* text);

/// Branch table of an RSC code. Immutable after construction.
class Trellis {
 public:
  explicit Trellis(const RscSpec& spec);

  const RscSpec& spec() const { return spec_; }
  int memory() const { return spec_.memory; }
  int num_states() const { return num_states_; }

  int next_state(int state, int input) const { return next_[2 * state + input]; }
  int parity(int state, int input) const { return parity_[2 * state + input]; }
  /// Input bit that shifts a zero into the register (drives toward state 0).
  int termination_input(int state) const { return term_input_[state]; }

  /// The two (state, input) pairs entering `state`.
  struct Branch {
    int from;
    int input;
  };
  std::span<const Branch, 2> predecessors(int state) const {
    return std::span<const Branch, 2>(pred_.data() + 2 * state, 2);
  }

 private:
  RscSpec spec_;
  int num_states_;
  std::vector<int> next_;
  std::vector<int> parity_;
  std::vector<int> term_input_;
  std::vector<Branch> pred_;
};

Trellis build_trellis(const RscSpec& spec);

struct RscCodeword {
  std::vector<uint8_t> parity;       // one per input bit
  std::vector<uint8_t> tail_inputs;  // empty unless terminated
  std::vector<uint8_t> tail_parity;
  int final_state = 0;               // state after the last input (before tail)
};

/// Encodes `info` from the zero state. With `terminate`, appends `memory`
/// tail steps that return the register to zero.
RscCodeword rsc_encode(const Trellis& trellis, std::span<const uint8_t> info, bool terminate);

enum class Boundary {
  kTerminated,    // start and end in state 0
  kEquiprobable,  // uniform state metrics at both edges
};

/// Reusable scratch for the forward-backward recursion.
class BcjrWorkspace {
 public:
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> beta_next;
};

/// Forward-backward APP decoder. Returns extrinsic LLRs
/// (a-posteriori minus a-priori minus systematic) for every trellis step.
///
/// For a terminated trellis the caller includes the tail steps in the
/// sequences; the recursion then pins both ends to state 0.
std::vector<double> bcjr(const Trellis& trellis, std::span<const double> sys_llr,
                         std::span<const double> par_llr, std::span<const double> apriori_llr,
                         Boundary boundary);

/// Allocation-free variant writing into `extrinsic` (same length as inputs).
void bcjr(const Trellis& trellis, std::span<const double> sys_llr, std::span<const double> par_llr,
          std::span<const double> apriori_llr, Boundary boundary, std::span<double> extrinsic,
          BcjrWorkspace& ws);

}  // namespace turbofade
