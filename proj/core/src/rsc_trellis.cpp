#include "turbofade/rsc_trellis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace turbofade {
namespace {

int coefficient(unsigned poly, int memory, int power) {
  return static_cast<int>((poly >> (memory - power)) & 1u);
}

inline double clamp_llr(double x) { return std::clamp(x, -kLlrCap, kLlrCap); }

// Scaled (normalized probability-domain) forward-backward recursion. This is
// the exact sum-product BCJR; per-step normalization keeps the metrics in
// range for inputs bounded by kLlrCap.
template <int kStates>
void run_bcjr(const Trellis& trellis, std::span<const double> sys, std::span<const double> par,
              std::span<const double> apr, Boundary boundary, std::span<double> ext,
              BcjrWorkspace& ws) {
  const int S = kStates > 0 ? kStates : trellis.num_states();
  const std::size_t n = sys.size();

  int next[2 * 64];
  int parity[2 * 64];
  for (int s = 0; s < S; ++s) {
    for (int u = 0; u < 2; ++u) {
      next[2 * s + u] = trellis.next_state(s, u);
      parity[2 * s + u] = trellis.parity(s, u);
    }
  }

  ws.alpha.resize((n + 1) * static_cast<std::size_t>(S));
  ws.beta.resize(S);
  ws.beta_next.resize(S);
  double* alpha = ws.alpha.data();

  if (boundary == Boundary::kTerminated) {
    std::fill(alpha, alpha + S, 0.0);
    alpha[0] = 1.0;
  } else {
    std::fill(alpha, alpha + S, 1.0 / S);
  }

  // hu = exp(La/2), hp = exp(Lp/2); metric of a branch with input u and
  // parity p is hu^(1-2u) * hp^(1-2p).
  for (std::size_t k = 0; k < n; ++k) {
    const double la = clamp_llr(sys[k]) + clamp_llr(apr[k]);
    const double lp = clamp_llr(par[k]);
    const double hu = std::exp(0.5 * la);
    const double hp = std::exp(0.5 * lp);
    const double g[2][2] = {{hu * hp, hu / hp}, {hp / hu, 1.0 / (hu * hp)}};
    const double* a = alpha + k * S;
    double* an = alpha + (k + 1) * S;
    for (int s = 0; s < S; ++s) an[s] = 0.0;
    for (int s = 0; s < S; ++s) {
      const double as = a[s];
      an[next[2 * s]] += as * g[0][parity[2 * s]];
      an[next[2 * s + 1]] += as * g[1][parity[2 * s + 1]];
    }
    double sum = 0.0;
    for (int s = 0; s < S; ++s) sum += an[s];
    const double inv = 1.0 / sum;
    for (int s = 0; s < S; ++s) an[s] *= inv;
  }

  double* b = ws.beta_next.data();  // beta_{k+1}
  double* bk = ws.beta.data();
  if (boundary == Boundary::kTerminated) {
    std::fill(b, b + S, 0.0);
    b[0] = 1.0;
  } else {
    std::fill(b, b + S, 1.0 / S);
  }

  for (std::size_t kk = n; kk-- > 0;) {
    const double la = clamp_llr(sys[kk]) + clamp_llr(apr[kk]);
    const double lp = clamp_llr(par[kk]);
    const double hu = std::exp(0.5 * la);
    const double hp = std::exp(0.5 * lp);
    const double ep[2] = {hp, 1.0 / hp};
    const double* a = alpha + kk * S;
    double num = 0.0;
    double den = 0.0;
    for (int s = 0; s < S; ++s) {
      const double t0 = ep[parity[2 * s]] * b[next[2 * s]];
      const double t1 = ep[parity[2 * s + 1]] * b[next[2 * s + 1]];
      num += a[s] * t0;
      den += a[s] * t1;
      bk[s] = hu * t0 + t1 / hu;
    }
    double e;
    if (num > 0.0 && den > 0.0) {
      e = clamp_llr(std::log(num / den));
    } else if (num > 0.0) {
      e = kLlrCap;
    } else if (den > 0.0) {
      e = -kLlrCap;
    } else {
      e = 0.0;
    }
    ext[kk] = e;
    double sum = 0.0;
    for (int s = 0; s < S; ++s) sum += bk[s];
    const double inv = 1.0 / sum;
    for (int s = 0; s < S; ++s) bk[s] *= inv;
    std::swap(b, bk);
  }
}

}  // namespace

void RscSpec::validate() const {
  if (memory < 1 || memory > 6) {
    throw std::invalid_argument("RSC memory must be in [1, 6], got " + std::to_string(memory));
  }
  const unsigned limit = 1u << (memory + 1);
  if (feedback_octal >= limit || feedforward_octal >= limit) {
    throw std::invalid_argument("RSC polynomial wider than memory+1 bits");
  }
  if (coefficient(feedback_octal, memory, 0) == 0) {
    throw std::invalid_argument("RSC feedback polynomial must have its constant term set");
  }
}

unsigned parse_octal(const char* text) {
  char* end = nullptr;
  const unsigned long v = std::strtoul(text, &end, 8);
  if (end == text || *end != '\0') {
    throw std::invalid_argument(std::string("not an octal literal: ") + text);
  }
  return static_cast<unsigned>(v);
}

Trellis::Trellis(const RscSpec& spec) : spec_(spec) {
  spec_.validate();
  const int nu = spec_.memory;
  num_states_ = 1 << nu;
  next_.resize(2 * num_states_);
  parity_.resize(2 * num_states_);
  term_input_.resize(num_states_);
  pred_.assign(2 * num_states_, Branch{-1, -1});

  // State bit (i-1) holds a_{k-i}, the register content i steps back.
  for (int s = 0; s < num_states_; ++s) {
    int fb = 0;
    int ff_tail = 0;
    for (int i = 1; i <= nu; ++i) {
      const int reg = (s >> (i - 1)) & 1;
      fb ^= reg & coefficient(spec_.feedback_octal, nu, i);
      ff_tail ^= reg & coefficient(spec_.feedforward_octal, nu, i);
    }
    term_input_[s] = fb;
    for (int u = 0; u < 2; ++u) {
      const int a = u ^ fb;
      const int ns = ((s << 1) | a) & (num_states_ - 1);
      next_[2 * s + u] = ns;
      parity_[2 * s + u] = (a & coefficient(spec_.feedforward_octal, nu, 0)) ^ ff_tail;
    }
  }
  std::vector<int> fill(num_states_, 0);
  for (int s = 0; s < num_states_; ++s) {
    for (int u = 0; u < 2; ++u) {
      const int ns = next_[2 * s + u];
      pred_[2 * ns + fill[ns]++] = Branch{s, u};
    }
  }
}

Trellis build_trellis(const RscSpec& spec) { return Trellis(spec); }

RscCodeword rsc_encode(const Trellis& trellis, std::span<const uint8_t> info, bool terminate) {
  if (info.empty()) throw std::invalid_argument("rsc_encode: empty input");
  RscCodeword out;
  out.parity.reserve(info.size());
  int state = 0;
  for (uint8_t bit : info) {
    const int u = bit & 1;
    out.parity.push_back(static_cast<uint8_t>(trellis.parity(state, u)));
    state = trellis.next_state(state, u);
  }
  out.final_state = state;
  if (terminate) {
    for (int i = 0; i < trellis.memory(); ++i) {
      const int u = trellis.termination_input(state);
      out.tail_inputs.push_back(static_cast<uint8_t>(u));
      out.tail_parity.push_back(static_cast<uint8_t>(trellis.parity(state, u)));
      state = trellis.next_state(state, u);
    }
  }
  return out;
}

void bcjr(const Trellis& trellis, std::span<const double> sys_llr, std::span<const double> par_llr,
          std::span<const double> apriori_llr, Boundary boundary, std::span<double> extrinsic,
          BcjrWorkspace& ws) {
  const std::size_t n = sys_llr.size();
  if (par_llr.size() != n || apriori_llr.size() != n || extrinsic.size() != n) {
    throw std::invalid_argument("bcjr: sequence length mismatch");
  }
  if (n == 0) return;
  switch (trellis.num_states()) {
    case 4: run_bcjr<4>(trellis, sys_llr, par_llr, apriori_llr, boundary, extrinsic, ws); break;
    case 8: run_bcjr<8>(trellis, sys_llr, par_llr, apriori_llr, boundary, extrinsic, ws); break;
    case 16: run_bcjr<16>(trellis, sys_llr, par_llr, apriori_llr, boundary, extrinsic, ws); break;
    default: run_bcjr<0>(trellis, sys_llr, par_llr, apriori_llr, boundary, extrinsic, ws); break;
  }
}

std::vector<double> bcjr(const Trellis& trellis, std::span<const double> sys_llr,
                         std::span<const double> par_llr, std::span<const double> apriori_llr,
                         Boundary boundary) {
  std::vector<double> ext(sys_llr.size());
  BcjrWorkspace ws;
  bcjr(trellis, sys_llr, par_llr, apriori_llr, boundary, ext, ws);
  return ext;
}

}  // namespace turbofade
