#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace turbofade {

/// Symmetric lattice x_k = (k - B/2) * delta, k = 0..B, delta = 2 max / B.
/// The endpoints +-max are the saturation point masses and x_{B/2} = 0 is
/// the erasure point.
struct LlrGrid {
  double max_llr = 40.0;
  int bins = 4096;  // B, even

  double delta() const { return 2.0 * max_llr / bins; }
  int points() const { return bins + 1; }
  int zero_index() const { return bins / 2; }
  double value(int k) const { return (k - bins / 2) * delta(); }
  /// Nearest lattice index with tails clamped onto the endpoints.
  int index_of(double x) const;
  void validate() const;
  bool operator==(const LlrGrid&) const = default;
};

/// Probability mass on an LlrGrid.
class LlrDensity {
 public:
  LlrDensity() = default;
  explicit LlrDensity(LlrGrid grid);
  LlrDensity(LlrGrid grid, std::vector<double> mass);

  static LlrDensity delta(LlrGrid grid, double value);
  /// N(mean, variance) integrated over each lattice cell; tails go to the endpoints.
  static LlrDensity gaussian(LlrGrid grid, double mean, double variance);
  /// Channel message density for gain alpha: N(2 a^2/s2, 4 a^2/s2); alpha = 0 gives delta(0).
  static LlrDensity from_channel(LlrGrid grid, double alpha, double noise_var);
  /// Histogram of integer counts per lattice point.
  static LlrDensity from_counts(LlrGrid grid, std::span<const uint64_t> counts);

  const LlrGrid& grid() const { return grid_; }
  std::span<const double> mass() const { return mass_; }
  std::span<double> mass() { return mass_; }

  double total_mass() const;
  double mean() const;
  double variance() const;
  /// P(L < 0) + P(L = 0) / 2.
  double error_probability() const;
  /// Rescales to unit mass, returning the drift |1 - mass| found before.
  double normalize();
  double total_variation(const LlrDensity& other) const;

 private:
  LlrGrid grid_;
  std::vector<double> mass_;
};

LlrDensity mixture(std::span<const std::pair<double, const LlrDensity*>> parts);

/// Exact lattice convolution ch * E1^(n1) * E2^(n2) * ... via zero-padded
/// real FFTs sized for the full support, then re-windowed onto the grid
/// with tails absorbed by the endpoints.
class FourierConvolver {
 public:
  explicit FourierConvolver(LlrGrid grid, int max_terms);
  ~FourierConvolver();
  FourierConvolver(const FourierConvolver&) = delete;
  FourierConvolver& operator=(const FourierConvolver&) = delete;

  int max_terms() const { return max_terms_; }

  using Spectrum = std::vector<std::complex<double>>;
  Spectrum transform(const LlrDensity& d);
  /// Convolution of the densities behind `factors`, each raised to its
  /// exponent. Exponents must sum to at most max_terms. The mass drift found
  /// before renormalisation is written to `drift` when non-null.
  LlrDensity convolve(std::span<const std::pair<const Spectrum*, int>> factors, double* drift = nullptr);

 private:
  LlrGrid grid_;
  int max_terms_;
  int size_;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

/// p_ch convolved with (d - 1) copies of the extrinsic density.
LlrDensity bitnode_update(const LlrDensity& channel, const LlrDensity& extrinsic, int degree);

}  // namespace turbofade
