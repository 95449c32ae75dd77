#include "turbofade/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace turbofade {

double DegreeProfile::fraction_of(int degree) const {
  for (const auto& e : entries_) {
    if (e.degree == degree) return e.fraction;
  }
  return 0.0;
}

std::string DegreeProfile::label() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ',';
    os << 'f' << entries_[i].degree << '=' << entries_[i].fraction;
  }
  return os.str();
}

DegreeProfile validate_profile(std::vector<DegreeFraction> raw) {
  if (raw.empty()) throw std::invalid_argument("degree profile is empty");
  std::map<int, double> merged;
  for (const auto& r : raw) {
    if (r.degree < 2) {
      throw std::invalid_argument("degree must be >= 2, got " + std::to_string(r.degree));
    }
    if (!(r.fraction >= 0.0)) {
      throw std::invalid_argument("negative fraction for degree " + std::to_string(r.degree));
    }
    merged[r.degree] += r.fraction;
  }
  double total = 0.0;
  for (const auto& [d, f] : merged) total += f;
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "degree fractions sum to " << total << ", expected 1";
    throw std::invalid_argument(os.str());
  }

  DegreeProfile p;
  double dbar = 0.0;
  for (const auto& [d, f] : merged) {
    if (f == 0.0) continue;
    const double fn = f / total;
    p.entries_.push_back({d, fn, 0.0});
    dbar += d * fn;
  }
  p.average_degree_ = dbar;
  for (auto& e : p.entries_) e.edge_fraction = e.degree * e.fraction / dbar;
  return p;
}

double turbo_rate(double rsc_rate, double average_degree) {
  return 1.0 / (1.0 + (1.0 / rsc_rate - 1.0) * average_degree);
}

double punctured_rsc_rate(double mother_rate, double punctured_fraction) {
  return 1.0 / (1.0 + (1.0 - punctured_fraction) * (1.0 / mother_rate - 1.0));
}

std::vector<int> class_counts(const DegreeProfile& profile, int info_bits) {
  std::vector<int> counts;
  int assigned = 0;
  for (const auto& e : profile.entries()) {
    const int c = static_cast<int>(std::floor(info_bits * e.fraction + 1e-9));
    counts.push_back(c);
    assigned += c;
  }
  counts.front() += info_bits - assigned;
  return counts;
}

CodeConfig derive_code_params(const DegreeProfile& profile, double mother_rate, double rate,
                              int info_bits, int fading_blocks) {
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("code rate must lie in (0, 1)");
  if (!(mother_rate > 0.0 && mother_rate < 1.0)) {
    throw std::invalid_argument("mother RSC rate must lie in (0, 1)");
  }
  if (info_bits < 1) throw std::invalid_argument("information length must be positive");
  if (fading_blocks < 1) throw std::invalid_argument("number of fading blocks must be positive");

  const double dbar = profile.average_degree();
  CodeConfig c;
  c.info_bits = info_bits;
  c.rate = rate;
  c.mother_rate = mother_rate;
  c.fading_blocks = fading_blocks;
  c.rsc_rate = 1.0 / (1.0 + (1.0 / rate - 1.0) / dbar);
  c.punctured_fraction = 1.0 - (1.0 / c.rsc_rate - 1.0) / (1.0 / mother_rate - 1.0);
  c.constituents = static_cast<int>(std::ceil(dbar - 1e-9));
  c.per_constituent_puncture =
      (c.constituents * c.punctured_fraction - 0.5) / (c.constituents - 1);

  constexpr double kTol = 1e-12;
  if (c.punctured_fraction < -kTol || c.punctured_fraction > 1.0 + kTol) {
    std::ostringstream os;
    os << "rate " << rate << " infeasible for dbar=" << dbar << ": punctured fraction "
       << c.punctured_fraction << " outside [0,1]";
    throw std::invalid_argument(os.str());
  }
  if (c.per_constituent_puncture < -kTol || c.per_constituent_puncture > 1.0 + kTol) {
    std::ostringstream os;
    os << "rate " << rate << " infeasible for dbar=" << dbar << ": phi_p "
       << c.per_constituent_puncture << " outside [0,1]";
    throw std::invalid_argument(os.str());
  }

  c.class_counts = class_counts(profile, info_bits);
  long long n = 0;
  for (std::size_t i = 0; i < c.class_counts.size(); ++i) {
    n += static_cast<long long>(profile.entries()[i].degree) * c.class_counts[i];
  }
  c.interleaver_size = static_cast<int>(n);
  return c;
}

DiversityReport singleton_diversity(int fading_blocks, double rate) {
  // A tiny guard keeps n_c (1 - R_c) = 1 from flooring to 0.
  const int delta = 1 + static_cast<int>(std::floor(fading_blocks * (1.0 - rate) + 1e-12));
  return {fading_blocks, rate, std::clamp(delta, 1, fading_blocks)};
}

std::vector<uint8_t> spread_pattern(int transmitted, int length) {
  if (transmitted < 0 || transmitted > length) {
    throw std::invalid_argument("spread_pattern: transmitted count outside [0, length]");
  }
  std::vector<uint8_t> mask(length, 0);
  const long long m = transmitted;
  const long long L = length;
  for (long long j = 0; j < L; ++j) {
    mask[j] = ((j + 1) * m) / L > (j * m) / L ? 1 : 0;
  }
  return mask;
}

std::vector<uint8_t> periodic_puncture_pattern(double punctured, int max_period) {
  if (!(punctured >= 0.0 && punctured <= 1.0)) {
    throw std::invalid_argument("punctured fraction outside [0,1]");
  }
  for (int q = 1; q <= max_period; ++q) {
    const double x = punctured * q;
    if (std::abs(x - std::round(x)) < 1e-9 * q) {
      return spread_pattern(q - static_cast<int>(std::round(x)), q);
    }
  }
  throw std::invalid_argument("no puncturing period up to max_period realizes the fraction");
}

}  // namespace turbofade
