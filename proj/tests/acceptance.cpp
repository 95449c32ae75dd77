// Acceptance suite: one PASS/FAIL line per criterion.
//
//   turbofade_acceptance [--criterion N]...   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "turbofade/channel.hpp"
#include "turbofade/density_evolution.hpp"
#include "turbofade/outage.hpp"
#include "turbofade/parallel.hpp"
#include "turbofade/sim_harness.hpp"

using namespace turbofade;

namespace {

const Trellis& rsc1315() {
  static const Trellis t(RscSpec{013, 015, 3});
  return t;
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

/// Collects sub-checks of one criterion and prints them indented.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    std::cout << "    " << (ok ? "ok   " : "FAIL ") << what << std::endl;
    pass_ = pass_ && ok;
    ++count_;
    failed_ += ok ? 0 : 1;
  }
  Verdict verdict() const {
    std::ostringstream os;
    os << (count_ - failed_) << "/" << count_ << " checks";
    return {pass_ && count_ > 0, os.str()};
  }

 private:
  bool pass_ = true;
  int count_ = 0;
  int failed_ = 0;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int workers() { return default_workers(); }

DegreeProfile irregular12() { return validate_profile({{2, 0.9}, {12, 0.1}}); }
DegreeProfile regular() { return validate_profile({{2, 1.0}}); }

CodeInstance make_code(const DegreeProfile& p, int K, MultiplexerKind kind = MultiplexerKind::kDiagonal) {
  return build_code(derive_code_params(p, 0.5, 0.5, K, 2), p, rsc1315(), 1, kind);
}

DeConfig default_de() {
  DeConfig c;
  c.workers = workers();
  return c;
}

/// DE settings for the fading criteria, which need many ray probes.
DeConfig boundary_de() {
  DeConfig c;
  c.grid = {40.0, 2048};
  c.window = 8000;
  c.samples = 200000;
  return c;
}

// ---------------------------------------------------------------------------

Verdict criterion_thresholds() {
  Checks ck;
  struct Case {
    std::vector<DegreeFraction> profile;
    double paper_db;
  };
  const Case cases[] = {
      {{{2, 0.9}, {9, 0.04}, {15, 0.06}}, 0.31},
      {{{2, 0.923}, {15, 0.077}}, 0.36},
      {{{2, 0.9}, {12, 0.1}}, 0.36},
  };
  for (const auto& c : cases) {
    const auto p = validate_profile(c.profile);
    const auto cc = derive_code_params(p, 0.5, 0.5, 6000, 2);
    const auto r = find_threshold(rsc1315(), awgn_graph(p, cc.punctured_fraction), 0.5, default_de(), 11);
    ck.expect(std::abs(r.threshold_db - c.paper_db) <= 0.10,
              p.label() + fmt(": threshold %.3f dB, expected %.2f +- 0.10 dB", r.threshold_db, c.paper_db));
  }
  return ck.verdict();
}

Verdict criterion_shannon_limit() {
  Checks ck;
  const double snr = 1.0 / noise_variance_from_ebn0_db(0.187, 0.5);
  const double c = biawgn_mutual_information(snr);
  ck.expect(std::abs(c - 0.5) <= 5e-3, fmt("C(0.187 dB) = %.6f, expected 0.5 +- 5e-3", c));
  // A threshold >= 0.15 dB is equivalent to DE failing at 0.15 dB (monotone verdict).
  const std::vector<std::vector<DegreeFraction>> ensembles = {
      {{2, 1.0}},
      {{2, 0.9}, {9, 0.04}, {15, 0.06}},
      {{2, 0.923}, {15, 0.077}},
      {{2, 0.9}, {12, 0.1}},
  };
  const double floor_db = 0.18 - 0.03;
  for (const auto& raw : ensembles) {
    const auto p = validate_profile(raw);
    const auto cc = derive_code_params(p, 0.5, 0.5, 6000, 2);
    const auto t = evolve(rsc1315(), awgn_graph(p, cc.punctured_fraction),
                          {{1.0}, noise_variance_from_ebn0_db(floor_db, 0.5)}, default_de(), 11);
    ck.expect(!t.converged(), p.label() + fmt(": DE at %.2f dB does not converge (P_b = %.3g)", floor_db,
                                              t.iterates.back().error_probability));
  }
  return ck.verdict();
}

Verdict criterion_puncturing() {
  Checks ck;
  auto r3 = [](double x) { return std::round(x * 1000.0) / 1000.0; };
  const auto a = derive_code_params(irregular12(), 0.5, 0.5, 6000, 2);
  ck.expect(std::abs(a.punctured_fraction - 2.0 / 3.0) < 1e-12, fmt("dbar = 3: f_p = %.12f", a.punctured_fraction));
  ck.expect(std::abs(a.per_constituent_puncture - 0.75) < 1e-12,
            fmt("dbar = 3: phi_p = %.12f", a.per_constituent_puncture));
  const auto b = derive_code_params(validate_profile({{2, 1.0 - 0.727 / 8.0}, {10, 0.727 / 8.0}}), 0.5, 0.5, 8000, 2);
  ck.expect(r3(b.punctured_fraction) == 0.633, fmt("dbar = 2.727: f_p = %.4f", b.punctured_fraction));
  ck.expect(r3(b.per_constituent_puncture) == 0.700, fmt("dbar = 2.727: phi_p = %.4f", b.per_constituent_puncture));
  return ck.verdict();
}

Verdict criterion_full_diversity() {
  Checks ck;
  const auto good = run_erasure_audit(make_code(irregular12(), 6000), 200, 21, {}, workers());
  ck.expect(good.failures[0] == 0, fmt("h-pi-diagonal, block 1 erased: %.0f/200 decoded", 200.0 - good.failures[0]));
  ck.expect(good.failures[1] == 0, fmt("h-pi-diagonal, block 2 erased: %.0f/200 decoded", 200.0 - good.failures[1]));
  const auto bad =
      run_erasure_audit(make_code(irregular12(), 6000, MultiplexerKind::kSabotaged), 200, 21, {}, workers());
  ck.expect(!bad.passed(), fmt("negative control: %.0f + %.0f failures", bad.failures[0], bad.failures[1]));
  return ck.verdict();
}

Verdict criterion_converse_ordering() {
  Checks ck;
  const auto angles = default_ray_angles(17);
  const auto graph = multiplexed_graph(irregular12());
  const auto code = make_code(irregular12(), 6000);
  for (double db : {6.0, 8.0}) {
    const auto info = information_outage_boundary(0.5, db, angles);
    DeoBoundaryOptions bopt;
    bopt.workers = workers();
    const auto deo = deo_boundary(rsc1315(), graph, 0.5, db, angles, boundary_de(), 31, bopt);
    int ordered = 0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
      const auto& d = deo.points[k];
      ordered += (d.unbounded || info[k].unbounded) ? (d.unbounded ? 1 : 0) : (info[k].radius <= d.radius ? 1 : 0);
    }
    ck.expect(ordered == static_cast<int>(angles.size()),
              fmt("%.0f dB: info-outage radius <= DEO radius on %.0f/17 rays", db, ordered));
    for (const auto& w : deo.warnings) std::cout << "      warning: " << w << '\n';

    const auto pout = outage_probability_bpsk(0.5, 2, db, 1000000, 41, workers());
    PdeoOptions popt;
    popt.workers = workers();
    const auto pdeo = p_deo(rsc1315(), graph, 0.5, db, deo.points, boundary_de(), 51, popt);
    SimOptions sopt;
    sopt.stop = {100, 200000};
    sopt.decode.max_iters = 20;
    sopt.workers = workers();
    const auto wer = run_wer_point(code, ChannelMode::kBlockFading, db, point_seed(61, db), sopt);
    std::cout << "      " << fmt("P_out %.4f [%.4f, %.4f]", pout.value, pout.lower, pout.upper) << "  "
              << fmt("P_DEO %.4f [%.4f, %.4f]", pdeo.estimate.value, pdeo.estimate.lower, pdeo.estimate.upper)
              << "  " << fmt("WER %.4f [%.4f, %.4f]", wer.wer, wer.wer_lower, wer.wer_upper) << '\n'
              << "      " << fmt("P_DEO cache: %.0f cached, %.0f direct", pdeo.cached, pdeo.direct)
              << fmt(", audit %.0f/%.0f agree", pdeo.audit_agreements, pdeo.audit_samples) << '\n';
    ck.expect(pout.lower <= pdeo.estimate.upper, fmt("%.0f dB: P_out <= P_DEO within 95%% CIs", db));
    ck.expect(pdeo.estimate.lower <= wer.wer_upper, fmt("%.0f dB: P_DEO <= WER within 95%% CIs", db));
  }
  return ck.verdict();
}

/// Eb/N0 where log10(y) first crosses log10(level), interpolated linearly.
double crossing(const std::vector<double>& x, const std::vector<double>& y, double level) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (y[i] < level && y[i - 1] >= level) {
      const double a = std::log10(std::max(y[i - 1], 1e-300)), b = std::log10(std::max(y[i], 1e-300));
      return x[i - 1] + (std::log10(level) - a) / (b - a) * (x[i] - x[i - 1]);
    }
  }
  return NAN;
}

Verdict criterion_outage_gap() {
  Checks ck;
  const auto code = make_code(irregular12(), 6000);
  SimOptions opt;
  opt.stop = {100, 100000};
  opt.decode.max_iters = 20;
  opt.workers = workers();
  opt.stop_below_wer = 1e-2;
  std::vector<double> grid;
  for (double db = 10.0; db <= 18.0 + 1e-9; db += 0.5) grid.push_back(db);
  const auto sim = run_wer_sweep(code, ChannelMode::kBlockFading, grid, 71, opt);
  std::vector<double> sx, sy;
  for (const auto& p : sim.points) {
    sx.push_back(p.ebn0_db);
    sy.push_back(p.wer);
    std::cout << "      " << fmt("%.1f dB: WER %.4g", p.ebn0_db, p.wer) << " (" << p.word_errors << "/" << p.frames
              << ")\n";
  }
  const double sim_db = crossing(sx, sy, 1e-2);
  std::vector<double> ox, oy;
  for (double db = 6.0; db <= 18.0 + 1e-9; db += 0.25) {
    ox.push_back(db);
    oy.push_back(outage_probability_bpsk(0.5, 2, db, 2000000, 81, workers()).value);
  }
  const double out_db = crossing(ox, oy, 1e-2);
  ck.expect(std::isfinite(sim_db), fmt("simulated WER crosses 1e-2 at %.2f dB", sim_db));
  ck.expect(std::isfinite(out_db), fmt("outage probability crosses 1e-2 at %.2f dB", out_db));
  ck.expect(sim_db - out_db <= 0.75, fmt("gap %.2f dB, allowed 0.75 dB", sim_db - out_db));
  return ck.verdict();
}

Verdict criterion_irregular_beats_regular() {
  Checks ck;
  const auto angles = default_ray_angles(17);
  const std::vector<double> rays = {angles[7], angles[8], angles[9]};
  DeoBoundaryOptions opt;
  opt.rel_tol = 0.002;
  opt.workers = workers();
  const auto irr = deo_boundary(rsc1315(), multiplexed_graph(irregular12()), 0.5, 8.0, rays, default_de(), 31, opt);
  const auto reg = deo_boundary(rsc1315(), multiplexed_graph(regular()), 0.5, 8.0, rays, default_de(), 31, opt);
  for (std::size_t k = 0; k < rays.size(); ++k) {
    const auto& a = irr.points[k];
    const auto& b = reg.points[k];
    const bool ok = !a.unbounded && (b.unbounded || a.radius <= b.radius);
    ck.expect(ok, fmt("ray %.0f deg: irregular DEO radius %.4f <= regular %.4f", rays[k], a.radius, b.radius));
  }
  return ck.verdict();
}

Verdict criterion_oracles() {
  Checks ck;
  testing::Gen gen(2024);

  // BCJR against exhaustive MAP.
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const RscSpec spec = gen.rsc(4);
    const Trellis t(spec);
    const int n = gen.integer(spec.memory + 1, 12);
    const auto sys = gen.llrs(n, 2.0), par = gen.llrs(n, 2.0), apr = gen.llrs(n, 2.0);
    const bool terminated = gen.coin();
    const auto got = bcjr(t, sys, par, apr, terminated ? Boundary::kTerminated : Boundary::kEquiprobable);
    const auto want = testing::brute_force_extrinsic(spec, sys, par, apr, terminated, std::vector<uint8_t>(n, 1));
    for (int k = 0; k < n; ++k) {
      if (std::abs(want[k]) < kLlrCap) worst = std::max(worst, std::abs(got[k] - want[k]));
    }
  }
  ck.expect(worst <= 1e-9, fmt("BCJR vs exhaustive MAP (K <= 12): max error %.2e", worst));

  // Fourier bitnode update against direct convolution.
  double worst_l1 = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const LlrGrid g{gen.real(10.0, 40.0), 2 * gen.integer(64, 512)};
    const auto ch = gen.density(g), ex = gen.density(g);
    const int d = gen.integer(2, 4);
    worst_l1 = std::max(worst_l1, 2.0 * bitnode_update(ch, ex, d).total_variation(testing::direct_bitnode(ch, ex, d)));
  }
  ck.expect(worst_l1 <= 1e-6, fmt("Fourier vs direct bitnode update: max L1 %.2e", worst_l1));

  // Gaussian closure.
  {
    const LlrGrid g{40.0, 4096};
    const auto c = bitnode_update(LlrDensity::gaussian(g, 2.0, 4.0), LlrDensity::gaussian(g, 1.0, 2.0), 4);
    const double h2 = g.delta() * g.delta();
    ck.expect(std::abs(c.mean() - 5.0) <= 4 * h2 && std::abs(c.variance() - 10.0) <= 4 * h2,
              fmt("Gaussian closure: N(%.6f, %.6f), expected N(5, 10)", c.mean(), c.variance()));
  }

  // Mass conservation.
  {
    const LlrGrid g{40.0, 4096};
    FourierConvolver conv(g, 16);
    double worst_drift = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = conv.transform(gen.density(g));
      const std::pair<const FourierConvolver::Spectrum*, int> f[] = {{&a, gen.integer(1, 16)}};
      double drift = 0.0;
      conv.convolve(f, &drift);
      worst_drift = std::max(worst_drift, drift);
    }
    ck.expect(worst_drift <= 1e-9, fmt("density mass drift per convolution: max %.2e", worst_drift));
  }

  // Diversity-2 slope.
  {
    const auto lo = outage_probability_bpsk(0.5, 2, 15.0, 10000000, 4, workers());
    const auto hi = outage_probability_bpsk(0.5, 2, 25.0, 10000000, 5, workers());
    const double slope = std::log10(lo.value / hi.value);
    ck.expect(std::abs(slope - 2.0) <= 0.2, fmt("P_out slope 15 to 25 dB: %.3f decades per 10 dB", slope));
  }
  return ck.verdict();
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {1, "threshold regression", criterion_thresholds},
      {2, "Shannon-limit sanity", criterion_shannon_limit},
      {3, "puncturing algebra", criterion_puncturing},
      {4, "full diversity under single-block erasure", criterion_full_diversity},
      {5, "converse ordering P_out <= P_DEO <= WER", criterion_converse_ordering},
      {6, "outage gap at WER 1e-2", criterion_outage_gap},
      {7, "irregular beats regular near the ergodic line", criterion_irregular_beats_regular},
      {8, "oracle equivalences", criterion_oracles},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: " << argv[0] << " [--criterion N]...\n";
      return 2;
    }
  }
  int failures = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    std::cout << "[" << c.id << "] " << c.name << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << v.detail
              << ", " << fmt("%.1f s", s) << ")" << std::endl;
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
