#include "turbofade/llr_density.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace turbofade {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

int fft_size_for(int min_size) {
  int n = 1;
  while (n < min_size) n <<= 1;
  return n;
}

}  // namespace

int LlrGrid::index_of(double x) const {
  const double t = std::round(x / delta()) + bins / 2;
  if (t <= 0.0) return 0;
  if (t >= bins) return bins;
  return static_cast<int>(t);
}

void LlrGrid::validate() const {
  if (bins < 2 || bins % 2 != 0) throw std::invalid_argument("LLR grid needs an even bin count >= 2");
  if (!(max_llr > 0.0)) throw std::invalid_argument("LLR grid half-width must be positive");
}

LlrDensity::LlrDensity(LlrGrid grid) : grid_(grid), mass_(grid.points(), 0.0) { grid_.validate(); }

LlrDensity::LlrDensity(LlrGrid grid, std::vector<double> mass) : grid_(grid), mass_(std::move(mass)) {
  grid_.validate();
  if (static_cast<int>(mass_.size()) != grid_.points()) {
    throw std::invalid_argument("LlrDensity: mass vector does not match grid");
  }
}

LlrDensity LlrDensity::delta(LlrGrid grid, double value) {
  LlrDensity d(grid);
  d.mass_[grid.index_of(value)] = 1.0;
  return d;
}

LlrDensity LlrDensity::gaussian(LlrGrid grid, double mean, double variance) {
  if (variance <= 0.0) return delta(grid, mean);
  LlrDensity d(grid);
  const double sd = std::sqrt(variance);
  const double h = grid.delta();
  double prev = 0.0;  // CDF at the lower edge of cell k
  for (int k = 0; k < grid.points(); ++k) {
    const double upper = k == grid.bins ? 1.0 : normal_cdf((grid.value(k) + 0.5 * h - mean) / sd);
    d.mass_[k] = std::max(0.0, upper - prev);
    prev = upper;
  }
  d.normalize();
  return d;
}

LlrDensity LlrDensity::from_channel(LlrGrid grid, double alpha, double noise_var) {
  if (alpha < 0.0) throw std::invalid_argument("fading gain must be nonnegative");
  if (alpha == 0.0) return delta(grid, 0.0);
  const double m = 2.0 * alpha * alpha / noise_var;
  return gaussian(grid, m, 2.0 * m);
}

LlrDensity LlrDensity::from_counts(LlrGrid grid, std::span<const uint64_t> counts) {
  if (static_cast<int>(counts.size()) != grid.points()) {
    throw std::invalid_argument("from_counts: histogram does not match grid");
  }
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), uint64_t{0}));
  if (total == 0.0) throw std::invalid_argument("from_counts: empty histogram");
  LlrDensity d(grid);
  for (int k = 0; k < grid.points(); ++k) d.mass_[k] = static_cast<double>(counts[k]) / total;
  return d;
}

double LlrDensity::total_mass() const { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }

double LlrDensity::mean() const {
  double m = 0.0;
  for (int k = 0; k < grid_.points(); ++k) m += mass_[k] * grid_.value(k);
  return m;
}

double LlrDensity::variance() const {
  const double mu = mean();
  double v = 0.0;
  for (int k = 0; k < grid_.points(); ++k) {
    const double x = grid_.value(k) - mu;
    v += mass_[k] * x * x;
  }
  return v;
}

double LlrDensity::error_probability() const {
  const int z = grid_.zero_index();
  double p = 0.5 * mass_[z];
  for (int k = 0; k < z; ++k) p += mass_[k];
  return p;
}

double LlrDensity::normalize() {
  const double t = total_mass();
  if (!(t > 0.0)) throw std::runtime_error("LlrDensity::normalize: zero mass");
  for (auto& m : mass_) m /= t;
  return std::abs(1.0 - t);
}

double LlrDensity::total_variation(const LlrDensity& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("total_variation: grid mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < mass_.size(); ++k) s += std::abs(mass_[k] - other.mass_[k]);
  return 0.5 * s;
}

LlrDensity mixture(std::span<const std::pair<double, const LlrDensity*>> parts) {
  if (parts.empty()) throw std::invalid_argument("mixture: no components");
  LlrDensity out(parts.front().second->grid());
  auto dst = out.mass();
  for (const auto& [w, d] : parts) {
    const auto src = d->mass();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += w * src[k];
  }
  return out;
}

FourierConvolver::FourierConvolver(LlrGrid grid, int max_terms)
    : grid_(grid), max_terms_(max_terms), size_(fft_size_for(max_terms * grid.bins + 1)) {
  grid_.validate();
  if (max_terms < 1) throw std::invalid_argument("FourierConvolver: max_terms must be >= 1");
  real_ = fftw_alloc_real(size_);
  auto* cplx = fftw_alloc_complex(size_ / 2 + 1);
  complex_ = cplx;
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft_r2c_1d(size_, real_, cplx, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r_1d(size_, cplx, real_, FFTW_ESTIMATE);
}

FourierConvolver::~FourierConvolver() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  fftw_free(real_);
  fftw_free(complex_);
}

FourierConvolver::Spectrum FourierConvolver::transform(const LlrDensity& d) {
  if (!(d.grid() == grid_)) throw std::invalid_argument("FourierConvolver: grid mismatch");
  const auto m = d.mass();
  std::fill(real_, real_ + size_, 0.0);
  std::copy(m.begin(), m.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  auto* c = static_cast<fftw_complex*>(complex_);
  Spectrum s(size_ / 2 + 1);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = {c[i][0], c[i][1]};
  return s;
}

LlrDensity FourierConvolver::convolve(std::span<const std::pair<const Spectrum*, int>> factors,
                                      double* drift) {
  int terms = 0;
  for (const auto& [s, e] : factors) {
    if (e < 0) throw std::invalid_argument("FourierConvolver: negative exponent");
    terms += e;
  }
  if (terms < 1 || terms > max_terms_) {
    throw std::invalid_argument("FourierConvolver: " + std::to_string(terms) + " terms exceed capacity");
  }
  const std::size_t nc = static_cast<std::size_t>(size_ / 2 + 1);
  auto* c = static_cast<fftw_complex*>(complex_);
  for (std::size_t i = 0; i < nc; ++i) {
    std::complex<double> acc(1.0, 0.0);
    for (const auto& [s, e] : factors) {
      std::complex<double> base = (*s)[i];
      for (int p = e; p > 0; p >>= 1) {
        if (p & 1) acc *= base;
        base *= base;
      }
    }
    c[i][0] = acc.real();
    c[i][1] = acc.imag();
  }
  fftw_execute(static_cast<fftw_plan>(backward_));

  const int B = grid_.bins;
  const long long shift = static_cast<long long>(terms - 1) * B / 2;
  const long long span = static_cast<long long>(terms) * B;
  LlrDensity out(grid_);
  auto dst = out.mass();
  const double scale = 1.0 / size_;
  for (long long i = 0; i <= span; ++i) {
    const double v = real_[i] * scale;
    if (v <= 0.0) continue;  // roundoff
    const long long k = std::clamp<long long>(i - shift, 0, B);
    dst[k] += v;
  }
  const double d = out.normalize();
  if (drift) *drift = d;
  return out;
}

LlrDensity bitnode_update(const LlrDensity& channel, const LlrDensity& extrinsic, int degree) {
  if (degree < 2) throw std::invalid_argument("bitnode_update: degree must be >= 2");
  FourierConvolver conv(channel.grid(), degree);
  const auto sc = conv.transform(channel);
  const auto se = conv.transform(extrinsic);
  const std::pair<const FourierConvolver::Spectrum*, int> f[] = {{&sc, 1}, {&se, degree - 1}};
  return conv.convolve(f);
}

}  // namespace turbofade
