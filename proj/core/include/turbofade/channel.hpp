#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "turbofade/rng.hpp"

namespace turbofade {

/// Real-valued BPSK model y = alpha x + w with unit symbol energy and noise
/// variance `noise_var`. Eb/N0 relates to the variance through
/// noise_var = 1 / (2 R_c Eb/N0); this is the only place that conversion lives.
double noise_variance_from_ebn0_db(double ebn0_db, double rate);
double ebn0_db_from_noise_variance(double noise_var, double rate);
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct FadingChannelSpec {
  int fading_blocks = 2;   // n_c
  int block_length = 0;    // L, symbols per block
  double ebn0_db = 0.0;
  double rate = 0.5;       // R_c

  double noise_variance() const { return noise_variance_from_ebn0_db(ebn0_db, rate); }
};

struct FadingRealization {
  std::vector<double> gains;  // alpha_c >= 0
};

/// alpha = sqrt(e), e ~ Exp(1), so E[alpha^2] = 1.
FadingRealization sample_rayleigh(int fading_blocks, Rng& rng);

std::vector<double> modulate_bpsk(std::span<const uint8_t> bits);

/// y_j = alpha[block(j)] x_j + w_j with w_j ~ N(0, noise_var).
std::vector<double> transmit(std::span<const double> symbols, std::span<const uint8_t> block_of,
                             const FadingRealization& fading, double noise_var, uint64_t seed);

/// 2 alpha y / noise_var; exactly 0 when alpha == 0.
inline double channel_llr(double y, double alpha, double noise_var) {
  return alpha == 0.0 ? 0.0 : 2.0 * alpha * y / noise_var;
}

std::vector<double> channel_llrs(std::span<const double> received, std::span<const uint8_t> block_of,
                                 const FadingRealization& fading, double noise_var);

/// BPSK-input AWGN mutual information in bits per channel use at
/// snr = alpha^2 / noise_var. 64-point Gauss-Hermite quadrature with a
/// series fallback below 1e-6.
double biawgn_mutual_information(double snr);

/// Tabulated biawgn_mutual_information for Monte Carlo loops
/// (linear interpolation in log-snr; absolute error below 1e-7).
class CapacityTable {
 public:
  CapacityTable();
  double operator()(double snr) const;
  static const CapacityTable& instance();

 private:
  double log_min_;
  double log_max_;
  double step_;
  std::vector<double> values_;
};

/// (1/n_c) sum_c MI(alpha_c^2 / noise_var).
double instantaneous_capacity(const FadingRealization& fading, const FadingChannelSpec& spec);
inline bool is_information_outage(const FadingRealization& fading, const FadingChannelSpec& spec) {
  return instantaneous_capacity(fading, spec) < spec.rate;
}

/// Gauss-Hermite nodes and weights for weight exp(-x^2).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(int order);

}  // namespace turbofade
