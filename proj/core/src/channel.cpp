#include "turbofade/channel.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace turbofade {
namespace {

double softplus(double x) {  // log(1 + e^x)
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

double noise_variance_from_ebn0_db(double ebn0_db, double rate) {
  return 1.0 / (2.0 * rate * db_to_linear(ebn0_db));
}

double ebn0_db_from_noise_variance(double noise_var, double rate) {
  return linear_to_db(1.0 / (2.0 * rate * noise_var));
}

FadingRealization sample_rayleigh(int fading_blocks, Rng& rng) {
  std::exponential_distribution<double> power(1.0);
  FadingRealization f;
  f.gains.resize(fading_blocks);
  for (auto& g : f.gains) g = std::sqrt(power(rng));
  return f;
}

std::vector<double> modulate_bpsk(std::span<const uint8_t> bits) {
  std::vector<double> x(bits.size());
  std::transform(bits.begin(), bits.end(), x.begin(),
                 [](uint8_t b) { return (b & 1) ? -1.0 : 1.0; });
  return x;
}

std::vector<double> transmit(std::span<const double> symbols, std::span<const uint8_t> block_of,
                             const FadingRealization& fading, double noise_var, uint64_t seed) {
  if (symbols.size() != block_of.size()) throw std::invalid_argument("transmit: map length mismatch");
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(noise_var));
  std::vector<double> y(symbols.size());
  for (std::size_t j = 0; j < symbols.size(); ++j) {
    if (block_of[j] >= fading.gains.size()) throw std::invalid_argument("transmit: block index out of range");
    y[j] = fading.gains[block_of[j]] * symbols[j] + noise(rng);
  }
  return y;
}

std::vector<double> channel_llrs(std::span<const double> received, std::span<const uint8_t> block_of,
                                 const FadingRealization& fading, double noise_var) {
  std::vector<double> llr(received.size());
  for (std::size_t j = 0; j < received.size(); ++j) {
    llr[j] = channel_llr(received[j], fading.gains[block_of[j]], noise_var);
  }
  return llr;
}

GaussHermiteRule gauss_hermite(int order) {
  // Newton iteration on orthonormal Hermite polynomials.
  const int n = order;
  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt(static_cast<double>(j - 1) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

double biawgn_mutual_information(double snr) {
  if (snr < 0.0) throw std::invalid_argument("snr must be nonnegative");
  if (snr == 0.0) return 0.0;
  if (snr < 1e-6) {
    return (snr - snr * snr / 2.0 + snr * snr * snr / 3.0) / (2.0 * std::numbers::ln2);
  }
  static const GaussHermiteRule rule = gauss_hermite(64);
  // LLR given x = +1 is N(2 snr, 4 snr).
  const double mean = 2.0 * snr;
  const double scale = std::numbers::sqrt2 * 2.0 * std::sqrt(snr);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * softplus(-(mean + scale * rule.nodes[i]));
  }
  const double c = 1.0 - acc / (std::sqrt(std::numbers::pi) * std::numbers::ln2);
  return std::clamp(c, 0.0, 1.0);
}

CapacityTable::CapacityTable()
    : log_min_(std::log(1e-7)), log_max_(std::log(1e4)), step_(0.0) {
  constexpr int kPoints = 40001;
  step_ = (log_max_ - log_min_) / (kPoints - 1);
  values_.resize(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    values_[i] = biawgn_mutual_information(std::exp(log_min_ + i * step_));
  }
}

double CapacityTable::operator()(double snr) const {
  if (snr <= 0.0) return 0.0;
  const double t = (std::log(snr) - log_min_) / step_;
  if (t <= 0.0) return biawgn_mutual_information(snr);
  if (t >= static_cast<double>(values_.size() - 1)) return values_.back();
  const auto i = static_cast<std::size_t>(t);
  const double f = t - static_cast<double>(i);
  return values_[i] + f * (values_[i + 1] - values_[i]);
}

const CapacityTable& CapacityTable::instance() {
  static const CapacityTable table;
  return table;
}

double instantaneous_capacity(const FadingRealization& fading, const FadingChannelSpec& spec) {
  const double nv = spec.noise_variance();
  double acc = 0.0;
  for (double a : fading.gains) acc += biawgn_mutual_information(a * a / nv);
  return acc / static_cast<double>(fading.gains.size());
}

}  // namespace turbofade
