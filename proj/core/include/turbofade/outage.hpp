#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "turbofade/density_evolution.hpp"
#include "turbofade/rsc_trellis.hpp"

namespace turbofade {

/// Largest fading gain probed along a ray (64x the average power).
inline constexpr double kRadiusCap = 8.0;

enum class BoundarySource { kInformationOutage, kDeo };

/// Verdict flip along the ray (r cos t, r sin t) in the (alpha_1, alpha_2) quadrant.
struct BoundaryPoint {
  double angle_deg = 0.0;
  double radius = 0.0;  // meaningless when unbounded
  BoundarySource source = BoundarySource::kInformationOutage;
  bool unbounded = false;
};

/// Binomial estimate with a 95% Wilson interval.
struct OutageEstimate {
  double value = 0.0;
  long long events = 0;
  long long samples = 0;
  double ci95 = 0.0;   // half-width of the Wilson interval
  double lower = 0.0;
  double upper = 0.0;
};

OutageEstimate binomial_estimate(long long events, long long samples);

/// Monte Carlo P(C(alpha) < R_c) over i.i.d. Rayleigh blocks.
OutageEstimate outage_probability_bpsk(double rate, int fading_blocks, double ebn0_db, long long samples,
                                       uint64_t seed, int workers = 1);

/// `count` angles spaced uniformly inside (0, 90) degrees: 90 k / (count + 1).
std::vector<double> default_ray_angles(int count = 17);

/// Radius where C(alpha) = R_c on each ray, found by bisection on [0, kRadiusCap].
std::vector<BoundaryPoint> information_outage_boundary(double rate, double ebn0_db,
                                                       std::span<const double> angles_deg);

/// Ray bisection of the DEO verdict. Starts at the information-outage
/// radius and stops once hi / lo < 1 + rel_tol. Common random numbers:
/// every probe along a ray uses the same DE seed.
struct DeoBoundaryOptions {
  double rel_tol = 0.01;
  int workers = 1;  // rays processed in parallel
};

struct DeoProbe {
  double angle_deg;
  double radius;
  bool converged;
};

struct DeoBoundaryResult {
  std::vector<BoundaryPoint> points;
  std::vector<DeoProbe> probes;
  std::vector<std::string> warnings;  // converse violations, non-monotone verdicts
};

DeoBoundaryResult deo_boundary(const Trellis& trellis, const DeGraph& graph, double rate, double ebn0_db,
                               std::span<const double> angles_deg, const DeConfig& config, uint64_t seed,
                               const DeoBoundaryOptions& options = {});

/// Classifies fading pairs against an interpolated DEO boundary.
class BoundaryCache {
 public:
  explicit BoundaryCache(std::vector<BoundaryPoint> points);

  /// False when the angle lies outside the sampled rays or next to an unbounded ray.
  bool covers(double alpha1, double alpha2) const;
  /// 1 when (alpha1, alpha2) lies inside the interpolated outage region. Requires covers().
  int classify(double alpha1, double alpha2) const;
  double radius_at(double angle_deg) const;

 private:
  std::vector<BoundaryPoint> points_;  // sorted by angle
};

struct PdeoOptions {
  long long samples = 500;
  long long audit_samples = 50;
  double min_angle_deg = 5.0;  // cache used only inside [min, 90 - min]
  int workers = 1;
};

struct PdeoResult {
  OutageEstimate estimate;
  long long cached = 0;  // samples classified by the boundary cache
  long long direct = 0;  // samples classified by a full DE run
  long long audit_samples = 0;
  long long audit_agreements = 0;
};

/// Monte Carlo average of the DEO indicator over Rayleigh pairs. With an
/// empty boundary every sample runs DE directly.
PdeoResult p_deo(const Trellis& trellis, const DeGraph& graph, double rate, double ebn0_db,
                 const std::vector<BoundaryPoint>& boundary, const DeConfig& config, uint64_t seed,
                 const PdeoOptions& options = {});

struct BoundaryRow {
  std::string ensemble_id;
  std::vector<BoundaryPoint> deo;
};

/// Columns angle_deg, radius_info_outage, radius_deo, ensemble_id, ebn0_db.
void write_boundary_csv(std::ostream& os, double ebn0_db, const std::vector<BoundaryPoint>& info,
                        const std::vector<BoundaryRow>& rows);
/// Columns value, ci95, samples, seed.
void write_estimate_csv(std::ostream& os, const OutageEstimate& e, uint64_t seed);

}  // namespace turbofade
