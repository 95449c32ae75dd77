#include "turbofade/turbo_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "turbofade/rng.hpp"

namespace turbofade {
namespace {

constexpr double kSaturated = kLlrCap;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("build_code: " + what);
}

// Greedy S-random fill of the segments after RSC 1. Slot j takes a bit from
// the pool selected by its type; a candidate must sit at least S away (in
// information index) from the bits of the previous S slots.
std::vector<int> spread_fill(const std::vector<uint8_t>& transmitted_slot, std::vector<int> pool_tx,
                             std::vector<int> pool_punct, int initial_spread, Rng& rng,
                             int& achieved) {
  const int L = static_cast<int>(transmitted_slot.size());
  constexpr int kTries = 64;
  for (int S = initial_spread; S >= 0; --S) {
    std::vector<int> tx = pool_tx;
    std::vector<int> pu = pool_punct;
    std::vector<int> out(L, -1);
    bool ok = true;
    for (int j = 0; j < L && ok; ++j) {
      std::vector<int>& pool = transmitted_slot[j] ? tx : pu;
      bool placed = false;
      const int tries = S == 0 ? 1 : kTries;
      for (int t = 0; t < tries && !placed; ++t) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const std::size_t idx = pick(rng);
        const int cand = pool[idx];
        bool good = true;
        for (int back = 1; back <= S && back <= j; ++back) {
          if (std::abs(out[j - back] - cand) < S) {
            good = false;
            break;
          }
        }
        if (good) {
          out[j] = cand;
          pool[idx] = pool.back();
          pool.pop_back();
          placed = true;
        }
      }
      ok = placed;
    }
    if (ok) {
      achieved = S;
      return out;
    }
  }
  throw std::logic_error("spread_fill: unreachable");
}

}  // namespace

CodeInstance build_code(const CodeConfig& config, const DegreeProfile& profile, const Trellis& trellis,
                        uint64_t seed, MultiplexerKind kind) {
  const int K = config.info_bits;
  require(config.fading_blocks == 2, "the multiplexer is defined for n_c = 2 only");
  require(std::abs(config.rate - 0.5) < 1e-12, "the multiplexer is defined for R_c = 1/2 only");
  require(std::abs(config.mother_rate - 0.5) < 1e-12, "the multiplexer assumes rho_0 = 1/2");
  require(K >= 4 && K % 2 == 0, "information length must be even and >= 4");
  require(config.class_counts.size() == profile.entries().size(), "class counts do not match profile");

  const auto& entries = profile.entries();
  int deg2_count = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].degree == 2) deg2_count = config.class_counts[i];
  }
  // Bits on the second block are the odd indices; each must have degree 2
  // so that exactly one of its copies can ride a transmitted parity slot.
  require(deg2_count >= K / 2, "need at least K/2 degree-2 bits (f_2 >= 1/2) for the block-2 class");

  Rng rng(derive_seed(seed, {0x636f6465ull}));

  CodeInstance code{config, profile, trellis, {}, {}, {}, {}, kind, seed};
  code.repeater.degree_of.assign(K, 2);

  // Block-1 bits (even indices) receive the remaining degree-2 bits and all
  // higher-degree bits, in random order.
  std::vector<int> block1_degrees;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int count = entries[i].degree == 2 ? config.class_counts[i] - K / 2 : config.class_counts[i];
    block1_degrees.insert(block1_degrees.end(), count, entries[i].degree);
  }
  require(static_cast<int>(block1_degrees.size()) == K / 2, "class counts do not add up to K");
  std::shuffle(block1_degrees.begin(), block1_degrees.end(), rng);
  for (int i = 0; i < K / 2; ++i) code.repeater.degree_of[2 * i] = block1_degrees[i];

  auto& rep = code.repeater;
  rep.edge_offset.assign(K + 1, 0);
  for (int b = 0; b < K; ++b) rep.edge_offset[b + 1] = rep.edge_offset[b] + rep.degree_of[b];
  const int N = rep.num_edges();
  require(N == config.interleaver_size, "interleaver size disagrees with class counts");

  // Segments: RSC 1 holds the information bits in natural order; the other
  // N - K steps split evenly into beta - 1 constituents.
  const int beta = config.constituents;
  require(beta >= 2, "need at least two constituents");
  auto& mux = code.mux;
  mux.segments.push_back({0, K});
  const int rest = N - K;
  for (int j = 0; j < beta - 1; ++j) {
    const int b0 = K + static_cast<int>(static_cast<long long>(rest) * j / (beta - 1));
    const int b1 = K + static_cast<int>(static_cast<long long>(rest) * (j + 1) / (beta - 1));
    mux.segments.push_back({b0, b1});
  }

  mux.systematic_block.assign(K, 0);
  for (int b = 1; b < K; b += 2) mux.systematic_block[b] = 1;

  mux.parity_block.assign(N, -1);
  code.bit_at.assign(N, -1);
  for (int b = 0; b < K; ++b) {
    code.bit_at[b] = b;
    if (b % 2 == 0) {
      mux.parity_block[b] = kind == MultiplexerKind::kDiagonal ? 1 : 0;
    }
  }

  // Transmitted parity after RSC 1: exactly K/2 slots on block 0, each
  // hosting a block-2 bit. Punctured slots host the extra copies of block-1
  // bits, so every degree > 2 bit lands in an H position.
  const std::vector<uint8_t> tx_slot = spread_pattern(K / 2, rest);
  std::vector<int> pool_tx;
  std::vector<int> pool_punct;
  for (int b = 1; b < K; b += 2) pool_tx.push_back(b);
  for (int b = 0; b < K; b += 2) pool_punct.insert(pool_punct.end(), rep.degree_of[b] - 1, b);
  require(static_cast<int>(pool_punct.size()) == rest - K / 2, "punctured slot count mismatch");

  const int initial_spread = static_cast<int>(std::floor(std::sqrt(N / 2.0)));
  const std::vector<int> fill =
      spread_fill(tx_slot, std::move(pool_tx), std::move(pool_punct), initial_spread, rng,
                  code.interleaver.spread);
  for (int j = 0; j < rest; ++j) {
    const int p = K + j;
    code.bit_at[p] = fill[j];
    if (tx_slot[j]) mux.parity_block[p] = 0;
  }

  // Interleaver in repeater order: copy 0 of bit b sits at position b, the
  // remaining copies at their slots in increasing position.
  auto& il = code.interleaver;
  il.forward.assign(N, -1);
  il.inverse.assign(N, -1);
  std::vector<int> next_copy(K, 0);
  for (int p = 0; p < N; ++p) {
    const int b = code.bit_at[p];
    const int e = rep.edge_offset[b] + next_copy[b]++;
    il.forward[e] = p;
    il.inverse[p] = e;
  }

  for (int b = 0; b < K; ++b) {
    mux.symbols.push_back({SymbolRole::kSystematic, b, mux.systematic_block[b]});
  }
  for (int p = 0; p < N; ++p) {
    if (mux.parity_block[p] >= 0) {
      mux.symbols.push_back({SymbolRole::kParity, p, static_cast<uint8_t>(mux.parity_block[p])});
    }
  }

  if (kind == MultiplexerKind::kDiagonal) {
    const auto violations = check_code_invariants(code);
    if (!violations.empty()) throw std::invalid_argument("build_code: " + violations.front());
  }
  return code;
}

std::vector<std::string> check_code_invariants(const CodeInstance& code) {
  std::vector<std::string> v;
  const int K = code.info_bits();
  const auto& mux = code.mux;
  const auto& rep = code.repeater;
  const int N = static_cast<int>(code.bit_at.size());

  if (rep.num_edges() != N) v.push_back("repeater edge count differs from trellis length");
  std::vector<int> seen(K, 0);
  for (int p = 0; p < N; ++p) {
    const int b = code.bit_at[p];
    if (b < 0 || b >= K) {
      v.push_back("trellis position without an information bit");
      return v;
    }
    ++seen[b];
  }
  for (int b = 0; b < K; ++b) {
    if (seen[b] != rep.degree_of[b]) {
      v.push_back("bit " + std::to_string(b) + " appears " + std::to_string(seen[b]) +
                  " times, degree " + std::to_string(rep.degree_of[b]));
      break;
    }
  }
  std::vector<uint8_t> hit(N, 0);
  for (int e = 0; e < N; ++e) {
    const int p = code.interleaver.forward[e];
    if (p < 0 || p >= N || hit[p] || code.interleaver.inverse[p] != e) {
      v.push_back("interleaver is not a bijection");
      break;
    }
    hit[p] = 1;
  }

  const Segment first = mux.segments.front();
  int first_tx = 0;
  for (int p = first.begin; p < first.end; ++p) first_tx += mux.parity_block[p] >= 0;
  if (2 * first_tx != first.size()) v.push_back("RSC 1 must transmit exactly half of its parity");

  std::vector<int> per_block(code.config.fading_blocks, 0);
  int systematic = 0;
  for (const auto& s : mux.symbols) {
    ++per_block[s.block];
    if (s.role == SymbolRole::kSystematic) ++systematic;
  }
  if (systematic != K) v.push_back("each information bit must be transmitted exactly once");
  for (int c = 1; c < code.config.fading_blocks; ++c) {
    if (per_block[c] != per_block[0]) {
      v.push_back("fading blocks carry unequal symbol counts");
      break;
    }
  }
  for (int p = 0; p < N; ++p) {
    if (mux.parity_block[p] >= 0 && mux.parity_block[p] == mux.systematic_block[code.bit_at[p]]) {
      v.push_back("trellis step " + std::to_string(p) +
                  " has its systematic and parity symbols on the same fading block");
      break;
    }
  }
  for (int p = first.end; p < N; ++p) {
    if (rep.degree_of[code.bit_at[p]] > 2 && mux.parity_block[p] >= 0) {
      v.push_back("degree > 2 bit placed on a transmitted parity slot (not an H position)");
      break;
    }
  }
  if (std::abs(code.realized_rate() - code.config.rate) >
      static_cast<double>(code.profile.max_degree()) / K) {
    v.push_back("realized rate deviates from the target by more than d_max/K");
  }
  return v;
}

TransmitFrame encode_frame(const CodeInstance& code, std::span<const uint8_t> info) {
  const int K = code.info_bits();
  if (static_cast<int>(info.size()) != K) throw std::invalid_argument("encode_frame: wrong info length");
  const int N = static_cast<int>(code.bit_at.size());
  std::vector<uint8_t> parity(N);
  std::vector<uint8_t> seg_in;
  for (const Segment& s : code.mux.segments) {
    seg_in.resize(s.size());
    for (int p = s.begin; p < s.end; ++p) seg_in[p - s.begin] = info[code.bit_at[p]] & 1;
    const RscCodeword cw = rsc_encode(code.trellis, seg_in, true);
    std::copy(cw.parity.begin(), cw.parity.end(), parity.begin() + s.begin);
  }
  TransmitFrame f;
  f.bits.reserve(code.mux.symbols.size());
  f.block.reserve(code.mux.symbols.size());
  for (const auto& sym : code.mux.symbols) {
    f.bits.push_back(sym.role == SymbolRole::kSystematic ? (info[sym.index] & 1) : parity[sym.index]);
    f.block.push_back(sym.block);
  }
  return f;
}

DecodeResult TurboDecoder::decode(std::span<const double> channel_llr, const DecodeOptions& options) {
  const CodeInstance& code = code_;
  const int K = code.info_bits();
  const int N = static_cast<int>(code.bit_at.size());
  const int nu = code.trellis.memory();
  if (static_cast<int>(channel_llr.size()) != code.frame_length()) {
    throw std::invalid_argument("decode_frame: LLR frame length mismatch");
  }

  par_.assign(N, 0.0);
  ext_.assign(N, 0.0);
  total_.assign(K, 0.0);
  for (std::size_t j = 0; j < channel_llr.size(); ++j) {
    const TxSymbol& s = code.mux.symbols[j];
    const double l = std::clamp(channel_llr[j], -kSaturated, kSaturated);
    if (s.role == SymbolRole::kSystematic) {
      total_[s.index] = l;
    } else {
      par_[s.index] = l;
    }
  }

  DecodeResult r;
  r.bits.assign(K, 0);
  std::vector<uint8_t> prev(K, 0);
  bool stable = false;
  int iter = 0;
  for (iter = 1; iter <= options.max_iters; ++iter) {
    for (const Segment& s : code.mux.segments) {
      const int n = s.size() + nu;
      seg_sys_.assign(n, 0.0);
      seg_par_.assign(n, 0.0);
      seg_apr_.assign(n, 0.0);
      seg_out_.resize(n);
      for (int p = s.begin; p < s.end; ++p) {
        const int k = p - s.begin;
        seg_par_[k] = par_[p];
        seg_apr_[k] = total_[code.bit_at[p]] - ext_[p];
      }
      bcjr(code.trellis, seg_sys_, seg_par_, seg_apr_, Boundary::kTerminated, seg_out_, ws_);
      for (int p = s.begin; p < s.end; ++p) {
        const double e = seg_out_[p - s.begin];
        total_[code.bit_at[p]] += e - ext_[p];
        ext_[p] = e;
      }
    }
    for (int b = 0; b < K; ++b) r.bits[b] = total_[b] < 0.0 ? 1 : 0;
    if (iter >= 2 && r.bits == prev) {
      stable = true;
      if (options.early_stop) break;
    } else {
      stable = false;
    }
    prev = r.bits;
  }
  r.iterations = std::min(iter, options.max_iters);
  r.converged = stable;
  r.app = total_;
  return r;
}

DecodeResult decode_frame(const CodeInstance& code, std::span<const double> channel_llr,
                          const DecodeOptions& options) {
  TurboDecoder dec(code);
  return dec.decode(channel_llr, options);
}

}  // namespace turbofade
