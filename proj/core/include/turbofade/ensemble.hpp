#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace turbofade {

/// Fraction of information bits repeated `degree` times.
struct DegreeFraction {
  int degree = 2;
  double fraction = 0.0;
};

/// Node-perspective repetition profile with its derived average degree and
/// edge-perspective fractions.
class DegreeProfile {
 public:
  struct Entry {
    int degree;
    double fraction;       // node perspective, f_d
    double edge_fraction;  // edge perspective, lambda_d = d f_d / dbar
  };

  const std::vector<Entry>& entries() const { return entries_; }
  double average_degree() const { return average_degree_; }
  int max_degree() const { return entries_.back().degree; }
  int min_degree() const { return entries_.front().degree; }
  double fraction_of(int degree) const;
  bool is_regular() const { return entries_.size() == 1; }

  /// Compact label such as "f2=0.9,f12=0.1".
  std::string label() const;

 private:
  friend DegreeProfile validate_profile(std::vector<DegreeFraction> raw);
  std::vector<Entry> entries_;  // sorted by degree, zero fractions dropped
  double average_degree_ = 0.0;
};

/// Throws std::invalid_argument for fractions not summing to one (1e-9),
/// negative fractions, or degrees below two.
DegreeProfile validate_profile(std::vector<DegreeFraction> raw);

/// Closed-form parameters of a punctured self-concatenated turbo code.
struct CodeConfig {
  int info_bits = 0;             // K
  int interleaver_size = 0;      // N, from the per-class rounded counts
  double rate = 0.5;             // R_c
  double mother_rate = 0.5;      // rho_0
  double rsc_rate = 0.0;         // rho, after puncturing
  double punctured_fraction = 0; // f_p
  int constituents = 0;          // beta = ceil(dbar)
  double per_constituent_puncture = 0;  // phi_p, constituents 2..beta
  int fading_blocks = 2;         // n_c
  std::vector<int> class_counts; // bits per degree class, aligned to profile entries
};

/// Inverts the rate relations for rho and f_p, then computes beta and phi_p.
/// Throws std::invalid_argument when the target rate is infeasible.
CodeConfig derive_code_params(const DegreeProfile& profile, double mother_rate, double rate,
                              int info_bits, int fading_blocks);

/// Forward evaluation of the rate relations (used for round-trip checks).
double turbo_rate(double rsc_rate, double average_degree);
double punctured_rsc_rate(double mother_rate, double punctured_fraction);

/// Bits per degree class: floor(K f_d), remainder to the lowest degree.
std::vector<int> class_counts(const DegreeProfile& profile, int info_bits);

struct DiversityReport {
  int fading_blocks;
  double rate;
  int diversity;  // 1 + floor(n_c (1 - R_c))
};

DiversityReport singleton_diversity(int fading_blocks, double rate);

/// Boolean transmit mask of `length` entries with exactly `transmitted`
/// ones spread as evenly as possible (Bresenham). Periodic whenever the
/// ratio is rational with small denominator.
std::vector<uint8_t> spread_pattern(int transmitted, int length);

/// Smallest periodic puncturing pattern (true = transmitted) realizing the
/// punctured fraction `punctured` exactly, searching periods up to `max_period`.
std::vector<uint8_t> periodic_puncture_pattern(double punctured, int max_period = 1000);

}  // namespace turbofade
