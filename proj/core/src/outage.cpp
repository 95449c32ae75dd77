#include "turbofade/outage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "turbofade/channel.hpp"
#include "turbofade/parallel.hpp"
#include "turbofade/rng.hpp"

namespace turbofade {
namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr long long kOutageChunk = 1 << 16;
constexpr double kRayGrowth = 1.25;

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

double ray_capacity(double r, double c, double s, double noise_var) {
  const double r2 = r * r / noise_var;
  return 0.5 * (biawgn_mutual_information(r2 * c * c) + biawgn_mutual_information(r2 * s * s));
}

}  // namespace

OutageEstimate binomial_estimate(long long events, long long samples) {
  if (samples <= 0 || events < 0 || events > samples) {
    throw std::invalid_argument("binomial_estimate: invalid counts");
  }
  OutageEstimate e;
  e.events = events;
  e.samples = samples;
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(events) / n;
  e.value = p;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  e.lower = events == 0 ? 0.0 : std::max(0.0, center - half);
  e.upper = events == samples ? 1.0 : std::min(1.0, center + half);
  e.ci95 = half;
  return e;
}

OutageEstimate outage_probability_bpsk(double rate, int fading_blocks, double ebn0_db, long long samples,
                                       uint64_t seed, int workers) {
  if (samples < 1) throw std::invalid_argument("outage_probability_bpsk: samples must be positive");
  if (fading_blocks < 1) throw std::invalid_argument("outage_probability_bpsk: need at least one block");
  const double snr_scale = 1.0 / noise_variance_from_ebn0_db(ebn0_db, rate);
  const CapacityTable& cap = CapacityTable::instance();
  const auto chunks = static_cast<std::size_t>((samples + kOutageChunk - 1) / kOutageChunk);
  std::vector<long long> events(chunks, 0);
  parallel_for(chunks, workers, [&](std::size_t c, int) {
    Rng rng(derive_seed(seed, {c}));
    std::exponential_distribution<double> power(1.0);
    const long long begin = static_cast<long long>(c) * kOutageChunk;
    const long long end = std::min(samples, begin + kOutageChunk);
    long long n = 0;
    for (long long i = begin; i < end; ++i) {
      double acc = 0.0;
      for (int b = 0; b < fading_blocks; ++b) acc += cap(power(rng) * snr_scale);
      if (acc < rate * fading_blocks) ++n;
    }
    events[c] = n;
  });
  long long total = 0;
  for (auto n : events) total += n;
  return binomial_estimate(total, samples);
}

std::vector<double> default_ray_angles(int count) {
  if (count < 1) throw std::invalid_argument("default_ray_angles: count must be positive");
  std::vector<double> a(count);
  for (int k = 0; k < count; ++k) a[k] = 90.0 * (k + 1) / (count + 1);
  return a;
}

std::vector<BoundaryPoint> information_outage_boundary(double rate, double ebn0_db,
                                                       std::span<const double> angles_deg) {
  const double nv = noise_variance_from_ebn0_db(ebn0_db, rate);
  std::vector<BoundaryPoint> out;
  for (double angle : angles_deg) {
    if (angle < 0.0 || angle > 90.0) throw std::invalid_argument("ray angle outside [0, 90] degrees");
    const double c = std::cos(to_rad(angle));
    const double s = std::sin(to_rad(angle));
    BoundaryPoint p{angle, 0.0, BoundarySource::kInformationOutage, false};
    // On an axis the capacity only approaches R_c = 1/n_c from below; the
    // 1e-12 slack keeps that limit from reading as a crossing.
    if (ray_capacity(kRadiusCap, c, s, nv) < rate + 1e-12) {
      p.unbounded = true;
      p.radius = kRadiusCap;
    } else {
      double lo = 0.0;
      double hi = kRadiusCap;
      for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ray_capacity(mid, c, s, nv) < rate ? lo : hi) = mid;
      }
      p.radius = 0.5 * (lo + hi);
    }
    out.push_back(p);
  }
  return out;
}

DeoBoundaryResult deo_boundary(const Trellis& trellis, const DeGraph& graph, double rate, double ebn0_db,
                               std::span<const double> angles_deg, const DeConfig& config, uint64_t seed,
                               const DeoBoundaryOptions& options) {
  if (!(options.rel_tol > 0.0)) throw std::invalid_argument("deo_boundary: rel_tol must be positive");
  const auto info = information_outage_boundary(rate, ebn0_db, angles_deg);
  const std::size_t rays = info.size();
  std::vector<BoundaryPoint> points(rays);
  std::vector<std::vector<DeoProbe>> probes(rays);
  std::vector<std::vector<std::string>> warnings(rays);

  parallel_for(rays, options.workers, [&](std::size_t k, int) {
    const double angle = info[k].angle_deg;
    const double c = std::cos(to_rad(angle));
    const double s = std::sin(to_rad(angle));
    auto fails = [&](double r) {
      const bool deo = deo_indicator(trellis, graph, r * c, r * s, ebn0_db, rate, config, seed) == 1;
      probes[k].push_back({angle, r, !deo});
      return deo;
    };
    BoundaryPoint p{angle, kRadiusCap, BoundarySource::kDeo, false};
    if (info[k].unbounded) {
      p.unbounded = true;
      points[k] = p;
      return;
    }
    double lo = info[k].radius;
    if (!fails(lo)) {
      std::ostringstream os;
      os << "ray " << angle << " deg: DE converges at the information-outage radius " << lo;
      warnings[k].push_back(os.str());
      while (lo > 1e-3 && !fails(lo / kRayGrowth)) lo /= kRayGrowth;
      lo /= kRayGrowth;
    }
    double hi = lo * kRayGrowth;
    for (;;) {
      if (hi >= kRadiusCap) {
        hi = kRadiusCap;
        if (fails(hi)) {
          p.unbounded = true;
          points[k] = p;
          return;
        }
        break;
      }
      if (!fails(hi)) break;
      lo = hi;
      hi *= kRayGrowth;
    }
    while (hi / lo > 1.0 + options.rel_tol) {
      const double mid = std::sqrt(lo * hi);
      (fails(mid) ? lo : hi) = mid;
    }
    p.radius = std::sqrt(lo * hi);
    points[k] = p;
  });

  DeoBoundaryResult r;
  r.points = std::move(points);
  for (std::size_t k = 0; k < rays; ++k) {
    r.probes.insert(r.probes.end(), probes[k].begin(), probes[k].end());
    r.warnings.insert(r.warnings.end(), warnings[k].begin(), warnings[k].end());
  }
  return r;
}

BoundaryCache::BoundaryCache(std::vector<BoundaryPoint> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end(),
            [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.angle_deg < b.angle_deg; });
}

double BoundaryCache::radius_at(double angle_deg) const {
  if (points_.empty()) throw std::logic_error("BoundaryCache is empty");
  if (angle_deg <= points_.front().angle_deg) return points_.front().radius;
  if (angle_deg >= points_.back().angle_deg) return points_.back().radius;
  auto it = std::upper_bound(points_.begin(), points_.end(), angle_deg,
                             [](double a, const BoundaryPoint& p) { return a < p.angle_deg; });
  const BoundaryPoint& b = *it;
  const BoundaryPoint& a = *(it - 1);
  const double t = (angle_deg - a.angle_deg) / (b.angle_deg - a.angle_deg);
  return a.radius + t * (b.radius - a.radius);
}

bool BoundaryCache::covers(double alpha1, double alpha2) const {
  if (points_.size() < 2) return false;
  const double angle = std::atan2(alpha2, alpha1) * 180.0 / std::numbers::pi;
  if (angle < points_.front().angle_deg || angle > points_.back().angle_deg) return false;
  auto it = std::lower_bound(points_.begin(), points_.end(), angle,
                             [](const BoundaryPoint& p, double a) { return p.angle_deg < a; });
  if (it->unbounded) return false;
  if (it != points_.begin() && it->angle_deg != angle && (it - 1)->unbounded) return false;
  return true;
}

int BoundaryCache::classify(double alpha1, double alpha2) const {
  const double angle = std::atan2(alpha2, alpha1) * 180.0 / std::numbers::pi;
  return std::hypot(alpha1, alpha2) < radius_at(angle) ? 1 : 0;
}

PdeoResult p_deo(const Trellis& trellis, const DeGraph& graph, double rate, double ebn0_db,
                 const std::vector<BoundaryPoint>& boundary, const DeConfig& config, uint64_t seed,
                 const PdeoOptions& options) {
  if (options.samples < 1) throw std::invalid_argument("p_deo: samples must be positive");
  const BoundaryCache cache(boundary);
  const double lo_angle = options.min_angle_deg;
  const double hi_angle = 90.0 - options.min_angle_deg;
  auto cacheable = [&](const FadingRealization& f) {
    const double angle = std::atan2(f.gains[1], f.gains[0]) * 180.0 / std::numbers::pi;
    return angle >= lo_angle && angle <= hi_angle && cache.covers(f.gains[0], f.gains[1]);
  };
  const uint64_t de_seed = derive_seed(seed, {2});
  auto direct = [&](const FadingRealization& f) {
    return deo_indicator(trellis, graph, f.gains[0], f.gains[1], ebn0_db, rate, config, de_seed);
  };

  const auto n = static_cast<std::size_t>(options.samples);
  std::vector<int> verdict(n, 0);
  std::vector<uint8_t> used_cache(n, 0);
  parallel_for(n, options.workers, [&](std::size_t i, int) {
    Rng rng(derive_seed(seed, {0, i}));
    const FadingRealization f = sample_rayleigh(2, rng);
    if (cacheable(f)) {
      verdict[i] = cache.classify(f.gains[0], f.gains[1]);
      used_cache[i] = 1;
    } else {
      verdict[i] = direct(f);
    }
  });

  PdeoResult r;
  long long events = 0;
  for (std::size_t i = 0; i < n; ++i) {
    events += verdict[i];
    (used_cache[i] ? r.cached : r.direct)++;
  }
  r.estimate = binomial_estimate(events, options.samples);

  if (options.audit_samples > 0 && !boundary.empty()) {
    std::vector<FadingRealization> fresh;
    for (uint64_t i = 0; static_cast<long long>(fresh.size()) < options.audit_samples; ++i) {
      Rng rng(derive_seed(seed, {1, i}));
      FadingRealization f = sample_rayleigh(2, rng);
      if (cacheable(f)) fresh.push_back(std::move(f));
      if (i > 1000 * static_cast<uint64_t>(options.audit_samples)) break;
    }
    std::vector<uint8_t> agree(fresh.size(), 0);
    parallel_for(fresh.size(), options.workers, [&](std::size_t i, int) {
      agree[i] = cache.classify(fresh[i].gains[0], fresh[i].gains[1]) == direct(fresh[i]);
    });
    r.audit_samples = static_cast<long long>(fresh.size());
    for (auto a : agree) r.audit_agreements += a;
  }
  return r;
}

namespace {

void write_radius(std::ostream& os, const BoundaryPoint& p) {
  if (p.unbounded) {
    os << "inf";
  } else {
    os << p.radius;
  }
}

}  // namespace

void write_boundary_csv(std::ostream& os, double ebn0_db, const std::vector<BoundaryPoint>& info,
                        const std::vector<BoundaryRow>& rows) {
  os << "angle_deg,radius_info_outage,radius_deo,ensemble_id,ebn0_db\n";
  os.precision(10);
  for (const auto& row : rows) {
    if (row.deo.size() != info.size()) throw std::invalid_argument("boundary rows must share the ray set");
    for (std::size_t k = 0; k < info.size(); ++k) {
      os << info[k].angle_deg << ',';
      write_radius(os, info[k]);
      os << ',';
      write_radius(os, row.deo[k]);
      os << ',' << row.ensemble_id << ',' << ebn0_db << '\n';
    }
  }
}

void write_estimate_csv(std::ostream& os, const OutageEstimate& e, uint64_t seed) {
  os << "value,ci95,samples,seed\n";
  os.precision(10);
  os << e.value << ',' << e.ci95 << ',' << e.samples << ',' << seed << '\n';
}

}  // namespace turbofade
