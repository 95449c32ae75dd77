#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "turbofade/channel.hpp"
#include "turbofade/outage.hpp"

using namespace turbofade;

namespace {

const Trellis& rsc1315() {
  static const Trellis t(RscSpec{013, 015, 3});
  return t;
}

/// P(I(g1 s) + I(g2 s) < 2R) for g_i ~ Exp(1): g2 integrated out in closed
/// form, g1 by Simpson's rule.
double outage_by_quadrature(double rate, double ebn0_db) {
  const double snr = 1.0 / noise_variance_from_ebn0_db(ebn0_db, rate);
  auto g2_needed = [&](double g1) {
    const double need = 2.0 * rate - biawgn_mutual_information(g1 * snr);
    if (need <= 0.0) return 0.0;
    if (need >= 1.0) return std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = 1.0;
    while (biawgn_mutual_information(hi * snr) < need) hi *= 2.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (biawgn_mutual_information(mid * snr) < need ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  // g1 = t^4 tames the power-law behaviour of g2_needed at the origin.
  auto f = [&](double t) {
    const double g1 = t * t * t * t;
    return 4.0 * t * t * t * std::exp(-g1) * -std::expm1(-g2_needed(g1));
  };
  const int n = 4000;
  const double top = std::pow(40.0, 0.25), h = top / n;
  double acc = f(0.0) + f(top);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

DeConfig light_config() {
  DeConfig c;
  c.grid = {40.0, 2048};
  c.window = 4000;
  c.samples = 200000;
  return c;
}

}  // namespace

TEST(Binomial, WilsonInterval) {
  const auto e = binomial_estimate(10, 100);
  EXPECT_DOUBLE_EQ(e.value, 0.1);
  EXPECT_NEAR(e.lower, 0.0552, 1e-3);
  EXPECT_NEAR(e.upper, 0.1744, 1e-3);
  const auto z = binomial_estimate(0, 1000);
  EXPECT_EQ(z.lower, 0.0);
  EXPECT_EQ(binomial_estimate(7, 7).upper, 1.0);
  EXPECT_GT(z.upper, 0.0);
  EXPECT_THROW(binomial_estimate(5, 0), std::invalid_argument);
}

TEST(Pout, MatchesQuadratureAtEightDb) {
  const double want = outage_by_quadrature(0.5, 8.0);
  const auto e = outage_probability_bpsk(0.5, 2, 8.0, 1000000, 3);
  EXPECT_NEAR(e.value, want, 4.0 * std::sqrt(want * (1 - want) / 1e6));
  EXPECT_LT(e.lower, want);
  EXPECT_GT(e.upper, want);
}

TEST(Pout, IsMonotoneInSnr) {
  double prev = 1.0;
  for (double db = 0.0; db <= 20.0; db += 2.0) {
    const auto e = outage_probability_bpsk(0.5, 2, db, 200000, 8);
    EXPECT_LE(e.value, prev) << db;
    prev = e.value;
  }
}

TEST(Pout, IsIndependentOfWorkerCount) {
  const auto a = outage_probability_bpsk(0.5, 2, 6.0, 300000, 8, 1);
  const auto b = outage_probability_bpsk(0.5, 2, 6.0, 300000, 8, 3);
  EXPECT_EQ(a.events, b.events);
}

TEST(Pout, DiversityTwoSlope) {
  const auto lo = outage_probability_bpsk(0.5, 2, 15.0, 10000000, 4);
  const auto hi = outage_probability_bpsk(0.5, 2, 25.0, 10000000, 5);
  ASSERT_GT(hi.events, 100);
  EXPECT_NEAR(std::log10(lo.value / hi.value), 2.0, 0.2);
}

TEST(InfoBoundary, DiagonalMatchesGridScan) {
  FadingChannelSpec spec;
  spec.ebn0_db = 8.0;
  for (double angle : {45.0, 20.0}) {
    const double t = angle * std::numbers::pi / 180.0;
    double scan = 0.0;
    for (double r = 0.0; r < kRadiusCap; r += 1e-5) {
      if (instantaneous_capacity({{r * std::cos(t), r * std::sin(t)}}, spec) >= 0.5) {
        scan = r;
        break;
      }
    }
    const double a[] = {angle};
    const auto b = information_outage_boundary(0.5, 8.0, a);
    ASSERT_FALSE(b[0].unbounded);
    EXPECT_NEAR(b[0].radius, scan, 1e-4) << angle;
  }
}

TEST(InfoBoundary, AxisRayIsUnbounded) {
  const double a[] = {0.0, 90.0};
  for (const auto& p : information_outage_boundary(0.5, 8.0, a)) EXPECT_TRUE(p.unbounded);
}

TEST(InfoBoundary, IsSymmetricAboutTheDiagonal) {
  const auto angles = default_ray_angles(17);
  ASSERT_EQ(angles.size(), 17u);
  EXPECT_DOUBLE_EQ(angles[8], 45.0);
  const auto b = information_outage_boundary(0.5, 6.0, angles);
  for (std::size_t k = 0; k < b.size(); ++k) EXPECT_NEAR(b[k].radius, b[b.size() - 1 - k].radius, 1e-9);
}

TEST(InfoBoundary, ShrinksWithSnr) {
  const auto angles = default_ray_angles(9);
  const auto at6 = information_outage_boundary(0.5, 6.0, angles);
  const auto at8 = information_outage_boundary(0.5, 8.0, angles);
  for (std::size_t k = 0; k < angles.size(); ++k) EXPECT_LT(at8[k].radius, at6[k].radius);
}

TEST(Cache, InterpolatesAndRefusesUnboundedNeighbours) {
  std::vector<BoundaryPoint> pts = {{10.0, 2.0}, {30.0, 1.0}, {50.0, 1.0}, {70.0, 0.0, BoundarySource::kDeo, true}};
  const BoundaryCache cache(pts);
  EXPECT_DOUBLE_EQ(cache.radius_at(20.0), 1.5);
  auto at = [](double deg, double r) {
    const double t = deg * std::numbers::pi / 180.0;
    return std::pair{r * std::cos(t), r * std::sin(t)};
  };
  auto [x, y] = at(20.0, 1.4);
  EXPECT_TRUE(cache.covers(x, y));
  EXPECT_EQ(cache.classify(x, y), 1);
  std::tie(x, y) = at(20.0, 1.6);
  EXPECT_EQ(cache.classify(x, y), 0);
  std::tie(x, y) = at(5.0, 1.0);
  EXPECT_FALSE(cache.covers(x, y));
  std::tie(x, y) = at(60.0, 1.0);
  EXPECT_FALSE(cache.covers(x, y));
  std::tie(x, y) = at(40.0, 1.0);
  EXPECT_TRUE(cache.covers(x, y));
}

TEST(Pdeo, SyntheticDiscBoundaryGivesGammaTail) {
  // A unit quarter-disc boundary: P(a1^2 + a2^2 < 1) = 1 - 2/e for unit-power Rayleigh blocks.
  std::vector<BoundaryPoint> disc;
  for (double a = 0.0; a <= 90.0; a += 15.0) disc.push_back({a, 1.0, BoundarySource::kDeo});
  PdeoOptions opt;
  opt.samples = 200000;
  opt.audit_samples = 0;
  opt.min_angle_deg = 0.0;
  const auto g = multiplexed_graph(validate_profile({{2, 0.9}, {12, 0.1}}));
  const auto r = p_deo(rsc1315(), g, 0.5, 8.0, disc, light_config(), 1, opt);
  EXPECT_EQ(r.direct, 0);
  const double want = 1.0 - 2.0 / std::numbers::e;
  EXPECT_NEAR(r.estimate.value, want, 4.0 * std::sqrt(want * (1 - want) / opt.samples));
}

TEST(DeoBoundary, DiagonalRadiusMatchesAwgnDensityEvolution) {
  const auto profile = validate_profile({{2, 0.9}, {12, 0.1}});
  const DeConfig cfg = light_config();
  const double a[] = {45.0};
  DeoBoundaryOptions opt;
  opt.rel_tol = 0.02;
  const auto b = deo_boundary(rsc1315(), multiplexed_graph(profile), 0.5, 8.0, a, cfg, 12, opt);
  ASSERT_FALSE(b.points[0].unbounded);
  const double info[] = {45.0};
  EXPECT_GE(b.points[0].radius, information_outage_boundary(0.5, 8.0, info)[0].radius);
  const double gain = b.points[0].radius / std::numbers::sqrt2;
  const auto awgn = awgn_graph(profile, 2.0 / 3.0);
  auto at = [&](double g) {
    const double db = 8.0 + 20.0 * std::log10(g);
    return evolve(rsc1315(), awgn, {{1.0}, noise_variance_from_ebn0_db(db, 0.5)}, cfg, 12).converged();
  };
  EXPECT_TRUE(at(gain * 1.04));
  EXPECT_FALSE(at(gain * 0.96));
}

TEST(Csv, BoundaryAndEstimateFormats) {
  const auto angles = default_ray_angles(3);
  const auto info = information_outage_boundary(0.5, 8.0, angles);
  std::vector<BoundaryPoint> deo = info;
  deo[0].unbounded = true;
  std::ostringstream os;
  write_boundary_csv(os, 8.0, info, {{"irregular", deo}});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "angle_deg,radius_info_outage,radius_deo,ensemble_id,ebn0_db");
  std::getline(in, line);
  EXPECT_NE(line.find(",inf,irregular,8"), std::string::npos) << line;
  std::ostringstream es;
  write_estimate_csv(es, binomial_estimate(3, 10), 42);
  EXPECT_EQ(es.str().substr(0, 23), "value,ci95,samples,seed");
}
