#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "support/oracles.hpp"
#include "turbofade/channel.hpp"

using namespace turbofade;

TEST(Bpsk, MapsBitsToSymbols) {
  const std::vector<uint8_t> zeros = {0, 0, 0};
  EXPECT_EQ(modulate_bpsk(zeros), (std::vector<double>{1.0, 1.0, 1.0}));
  const std::vector<uint8_t> one = {1};
  EXPECT_EQ(modulate_bpsk(one), (std::vector<double>{-1.0}));
}

TEST(Bpsk, SignDemappingRoundTrips) {
  Rng rng(3);
  std::vector<uint8_t> bits(1000);
  for (auto& b : bits) b = rng() & 1;
  const auto x = modulate_bpsk(bits);
  for (std::size_t i = 0; i < bits.size(); ++i) EXPECT_EQ(x[i] < 0.0, bits[i] == 1);
}

TEST(Transmit, NoiselessLimitReturnsSymbols) {
  const std::vector<uint8_t> bits = {0, 1, 1, 0};
  const std::vector<uint8_t> block = {0, 1, 0, 1};
  const auto x = modulate_bpsk(bits);
  const auto y = transmit(x, block, {{1.0, 1.0}}, 1e-30, 1);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i], 1e-12);
}

TEST(Transmit, ErasedBlockIsPureNoise) {
  const std::size_t n = 200000;
  std::vector<double> x(n, 1.0);
  std::vector<uint8_t> block(n);
  for (std::size_t i = 0; i < n; ++i) block[i] = i % 2;
  const auto y = transmit(x, block, {{0.0, 1.0}}, 1.0, 9);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < n; i += 2) m0 += y[i];
  for (std::size_t i = 1; i < n; i += 2) m1 += y[i];
  m0 /= n / 2.0;
  m1 /= n / 2.0;
  EXPECT_NEAR(m0, 0.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m1, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Transmit, NoiseVarianceMatches) {
  const std::size_t n = 1000000;
  const double nv = 0.37;
  std::vector<double> x(n, -1.0);
  std::vector<uint8_t> block(n, 0);
  const auto y = transmit(x, block, {{0.6}}, nv, 21);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = y[i] - 0.6 * x[i];
    s += w;
    s2 += w * w;
  }
  const double var = s2 / n - (s / n) * (s / n);
  EXPECT_NEAR(var / nv, 1.0, 0.01);
}

TEST(Llr, ClosedForm) {
  EXPECT_DOUBLE_EQ(channel_llr(1.0, 1.0, 2.0), 1.0);
  EXPECT_EQ(channel_llr(3.7, 0.0, 1.0), 0.0);
  EXPECT_EQ(channel_llr(-1e9, 0.0, 1e-9), 0.0);
}

TEST(Llr, MomentsAreConsistentUnderFading) {
  const std::size_t n = 1000000;
  const double alpha = 0.8, nv = 1.0;
  std::vector<double> x(n, 1.0);
  std::vector<uint8_t> block(n, 0);
  const FadingRealization f{{alpha}};
  const auto llr = channel_llrs(transmit(x, block, f, nv, 5), block, f, nv);
  double s = 0.0, s2 = 0.0;
  for (double l : llr) {
    s += l;
    s2 += l * l;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  const double want = 2.0 * alpha * alpha / nv;  // 1.28
  EXPECT_NEAR(mean, want, 3.0 * std::sqrt(2.0 * want / n));
  EXPECT_NEAR(var / (2.0 * mean), 1.0, 0.01);
}

TEST(Llr, AwgnPathMatchesUnitFadingPath) {
  // Two-sample comparison of the alpha = (1,1) fading path against direct
  // AWGN samples.
  const std::size_t n = 200000;
  const double nv = 0.8;
  std::vector<double> x(n, 1.0);
  std::vector<uint8_t> block(n);
  for (std::size_t i = 0; i < n; ++i) block[i] = i & 1;
  const FadingRealization unit{{1.0, 1.0}};
  const auto a = channel_llrs(transmit(x, block, unit, nv, 77), block, unit, nv);
  Rng rng(78);
  std::normal_distribution<double> g(0.0, std::sqrt(nv));
  std::vector<double> b(n);
  for (auto& v : b) v = 2.0 * (1.0 + g(rng)) / nv;
  auto moments = [&](const std::vector<double>& v) {
    double s = 0.0, s2 = 0.0;
    for (double t : v) {
      s += t;
      s2 += t * t;
    }
    return std::pair{s / n, s2 / n - (s / n) * (s / n)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  EXPECT_LT(std::abs(ma - mb) / std::sqrt((va + vb) / n), 4.0);
  EXPECT_NEAR(va / vb, 1.0, 0.02);
}

TEST(Rayleigh, UnitAveragePower) {
  Rng rng(5);
  double p = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const auto f = sample_rayleigh(2, rng);
    for (double a : f.gains) {
      EXPECT_GE(a, 0.0);
      p += a * a;
    }
  }
  EXPECT_NEAR(p / (2.0 * n), 1.0, 0.01);
}

TEST(SnrConvention, RoundTrips) {
  for (double db : {-3.0, 0.0, 0.187, 8.0, 25.0}) {
    for (double r : {0.25, 0.5, 0.9}) {
      EXPECT_NEAR(ebn0_db_from_noise_variance(noise_variance_from_ebn0_db(db, r), r), db, 1e-12);
    }
  }
  EXPECT_NEAR(noise_variance_from_ebn0_db(0.0, 0.5), 1.0, 1e-15);
}

TEST(GaussHermite, IntegratesPolynomialsExactly) {
  const auto rule = gauss_hermite(64);
  ASSERT_EQ(rule.nodes.size(), 64u);
  // int x^{2k} exp(-x^2) dx = Gamma(k + 1/2)
  for (int k = 0; k < 20; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], 2 * k);
    EXPECT_NEAR(acc / std::tgamma(k + 0.5), 1.0, 1e-10) << k;
  }
}

TEST(MutualInformation, Limits) {
  EXPECT_EQ(biawgn_mutual_information(0.0), 0.0);
  EXPECT_NEAR(biawgn_mutual_information(1e4), 1.0, 1e-12);
  EXPECT_NEAR(biawgn_mutual_information(1e-8), 1e-8 / (2.0 * std::log(2.0)), 1e-14);
}

TEST(MutualInformation, MatchesTrapezoidOracle) {
  for (double snr : {1e-5, 1e-3, 0.01, 0.1, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    EXPECT_NEAR(biawgn_mutual_information(snr), turbofade::testing::trapezoid_mutual_information(snr), 2e-6)
        << snr;
  }
}

TEST(MutualInformation, MonotoneAndConcave) {
  double prev = -1.0, prev_slope = 1e300;
  const double h = 0.01;
  for (int i = 0; i <= 2000; ++i) {
    const double s = i * h;
    const double v = biawgn_mutual_information(s);
    EXPECT_GE(v, prev);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    if (i > 0) {
      const double slope = (v - prev) / h;
      EXPECT_LE(slope, prev_slope + 1e-9);
      prev_slope = slope;
    }
    prev = v;
  }
}

TEST(MutualInformation, HalfAtShannonLimit) {
  const double snr = 1.0 / noise_variance_from_ebn0_db(0.187, 0.5);
  EXPECT_NEAR(biawgn_mutual_information(snr), 0.5, 5e-3);
  EXPECT_NEAR(biawgn_mutual_information(snr), 0.5, 1e-4);
}

TEST(CapacityTable, MatchesDirectEvaluation) {
  const auto& t = CapacityTable::instance();
  for (double ls = -16.0; ls < 9.0; ls += 0.0137) {
    const double s = std::exp(ls);
    EXPECT_NEAR(t(s), biawgn_mutual_information(s), 1e-7) << s;
  }
  EXPECT_EQ(t(0.0), 0.0);
  EXPECT_NEAR(t(1e6), 1.0, 1e-9);
}

TEST(InstantaneousCapacity, Examples) {
  FadingChannelSpec spec;
  spec.ebn0_db = 8.0;
  EXPECT_EQ(instantaneous_capacity({{0.0, 0.0}}, spec), 0.0);
  EXPECT_TRUE(is_information_outage({{0.0, 0.0}}, spec));
  spec.ebn0_db = 40.0;
  EXPECT_NEAR(instantaneous_capacity({{1.0, 1.0}}, spec), 1.0, 1e-9);
  EXPECT_FALSE(is_information_outage({{1.0, 1.0}}, spec));
}
