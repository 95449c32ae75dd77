#include "turbofade/sim_harness.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "turbofade/channel.hpp"
#include "turbofade/outage.hpp"
#include "turbofade/parallel.hpp"
#include "turbofade/rng.hpp"

namespace turbofade {
namespace {

constexpr std::size_t kBatch = 256;

std::vector<uint8_t> random_bits(int n, Rng& rng) {
  std::vector<uint8_t> b(n);
  for (int i = 0; i < n; i += 64) {
    const uint64_t w = rng();
    for (int j = 0; j < 64 && i + j < n; ++j) b[i + j] = (w >> j) & 1;
  }
  return b;
}

int count_errors(std::span<const uint8_t> a, std::span<const uint8_t> b) {
  int e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
  return e;
}

}  // namespace

uint64_t point_seed(uint64_t seed, double ebn0_db) {
  return derive_seed(seed, {std::bit_cast<uint64_t>(ebn0_db)});
}

FrameOutcome simulate_frame(const CodeInstance& code, ChannelMode mode, double ebn0_db, uint64_t point_seed,
                            uint64_t frame, const DecodeOptions& decode) {
  const uint64_t s = derive_seed(point_seed, {frame});
  Rng rng(s);
  const std::vector<uint8_t> info = random_bits(code.info_bits(), rng);
  const FadingRealization fading =
      mode == ChannelMode::kAwgn ? FadingRealization{{1.0, 1.0}} : sample_rayleigh(2, rng);
  const double nv = noise_variance_from_ebn0_db(ebn0_db, code.config.rate);
  const TransmitFrame tx = encode_frame(code, info);
  const auto y = transmit(modulate_bpsk(tx.bits), tx.block, fading, nv, derive_seed(s, {1}));
  const auto llr = channel_llrs(y, tx.block, fading, nv);
  TurboDecoder dec(code);
  const DecodeResult r = dec.decode(llr, decode);
  return {count_errors(r.bits, info), r.iterations};
}

SimPoint run_wer_point(const CodeInstance& code, ChannelMode mode, double ebn0_db, uint64_t pseed,
                       const SimOptions& options) {
  if (options.stop.min_word_errors < 1 || options.stop.max_frames < 1) {
    throw std::invalid_argument("stop rule needs positive error and frame limits");
  }
  const auto t0 = std::chrono::steady_clock::now();
  SimPoint p;
  p.ebn0_db = ebn0_db;
  p.seed = pseed;
  long long iterations = 0;
  bool done = false;
  for (long long start = 0; !done && start < options.stop.max_frames;) {
    const std::size_t n = static_cast<std::size_t>(
        std::min<long long>(static_cast<long long>(kBatch), options.stop.max_frames - start));
    std::vector<FrameOutcome> out(n);
    parallel_for(n, options.workers, [&](std::size_t i, int) {
      out[i] = simulate_frame(code, mode, ebn0_db, pseed, static_cast<uint64_t>(start) + i, options.decode);
    });
    for (std::size_t i = 0; i < n; ++i) {
      ++p.frames;
      iterations += out[i].iterations;
      p.bit_errors += out[i].bit_errors;
      if (out[i].bit_errors > 0) ++p.word_errors;
      if (p.word_errors >= options.stop.min_word_errors) {
        done = true;
        break;
      }
    }
    start += static_cast<long long>(n);
  }
  const OutageEstimate w = binomial_estimate(p.word_errors, p.frames);
  p.wer = w.value;
  p.wer_lower = w.lower;
  p.wer_upper = w.upper;
  p.ber = static_cast<double>(p.bit_errors) / (static_cast<double>(p.frames) * code.info_bits());
  p.mean_iterations = static_cast<double>(iterations) / static_cast<double>(p.frames);
  p.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return p;
}

SimResult run_wer_sweep(const CodeInstance& code, ChannelMode mode, std::span<const double> ebn0_db,
                        uint64_t seed, const SimOptions& options) {
  SimResult r;
  r.mode = mode;
  for (double db : ebn0_db) {
    r.points.push_back(run_wer_point(code, mode, db, point_seed(seed, db), options));
    if (options.stop_below_wer > 0.0 && r.points.back().wer <= options.stop_below_wer) break;
  }
  return r;
}

ErasureAuditReport run_erasure_audit(const CodeInstance& code, int trials, uint64_t seed,
                                     const DecodeOptions& decode, int workers) {
  if (trials < 1) throw std::invalid_argument("erasure audit needs at least one trial");
  ErasureAuditReport rep;
  rep.trials = trials;
  const auto jobs = static_cast<std::size_t>(trials) * 2;
  std::vector<ErasureFailure> outcome(jobs);
  parallel_for(jobs, workers, [&](std::size_t j, int) {
    const int trial = static_cast<int>(j / 2);
    const int erased = static_cast<int>(j % 2);
    const uint64_t s = derive_seed(seed, {static_cast<uint64_t>(trial)});
    Rng rng(s);
    const std::vector<uint8_t> info = random_bits(code.info_bits(), rng);
    const TransmitFrame tx = encode_frame(code, info);
    std::vector<double> llr(tx.bits.size());
    for (std::size_t i = 0; i < llr.size(); ++i) {
      llr[i] = tx.block[i] == erased ? 0.0 : (tx.bits[i] ? -kLlrCap : kLlrCap);
    }
    TurboDecoder dec(code);
    const DecodeResult r = dec.decode(llr, decode);
    outcome[j] = {trial, erased, count_errors(r.bits, info), r.iterations, s};
  });
  for (const auto& o : outcome) {
    if (o.bit_errors > 0) {
      rep.failures[o.erased_block]++;
      if (rep.dumps.size() < 20) rep.dumps.push_back(o);
    }
  }
  return rep;
}

void write_sim_csv(std::ostream& os, const SimResult& r, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
  os << "# channel: " << (r.mode == ChannelMode::kAwgn ? "awgn" : "block_fading") << '\n';
  os << "ebn0_db,frames,word_errors,bit_errors,wer,ber,wer_ci_low,wer_ci_high,mean_iterations,seed\n";
  os.precision(10);
  for (const auto& p : r.points) {
    os << p.ebn0_db << ',' << p.frames << ',' << p.word_errors << ',' << p.bit_errors << ',' << p.wer << ','
       << p.ber << ',' << p.wer_lower << ',' << p.wer_upper << ',' << p.mean_iterations << ','
       << p.seed << '\n';
  }
}

}  // namespace turbofade
