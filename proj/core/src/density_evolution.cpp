#include "turbofade/density_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "turbofade/channel.hpp"
#include "turbofade/parallel.hpp"
#include "turbofade/rng.hpp"

namespace turbofade {
namespace {

constexpr double kDriftLimit = 1e-9;

// Walker/Vose alias table over lattice points.
class AliasSampler {
 public:
  explicit AliasSampler(const LlrDensity& d) : grid_(d.grid()) {
    const auto m = d.mass();
    const int n = static_cast<int>(m.size());
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<int> small, large;
    for (int i = 0; i < n; ++i) {
      scaled[i] = m[i] * n;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const int s = small.back();
      small.pop_back();
      const int l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (int i : large) prob_[i] = 1.0;
    for (int i : small) prob_[i] = 1.0;
    values_.resize(n);
    for (int i = 0; i < n; ++i) values_[i] = grid_.value(i);
  }

  double operator()(Rng& rng) const {
    const uint64_t r = rng();
    const auto column = static_cast<std::size_t>((r >> 32) * prob_.size() >> 32);
    const double u = static_cast<double>(r & 0xffffffffull) * (1.0 / 4294967296.0);
    return values_[u < prob_[column] ? column : static_cast<std::size_t>(alias_[column])];
  }

 private:
  LlrGrid grid_;
  std::vector<double> prob_;
  std::vector<int> alias_;
  std::vector<double> values_;
};

struct ParitySource {
  double mean = 0.0;
  double sd = 0.0;
  bool erased = true;
};

ParitySource parity_source(const DeChannel& ch, int block) {
  ParitySource p;
  if (block < 0) return p;
  if (block >= static_cast<int>(ch.gains.size())) throw std::invalid_argument("DE: parity block out of range");
  const double g = ch.gains[block];
  if (g == 0.0) return p;
  p.mean = 2.0 * g * g / ch.noise_var;
  p.sd = std::sqrt(2.0 * p.mean);
  p.erased = false;
  return p;
}

}  // namespace

void DeConfig::validate() const {
  grid.validate();
  if (window < 16) throw std::invalid_argument("DE window too short");
  if (guard < 0 || 2 * guard >= window) throw std::invalid_argument("DE guard must be below W/2");
  if (samples < 1) throw std::invalid_argument("DE sample count must be positive");
  if (max_iters < 1) throw std::invalid_argument("DE max_iters must be positive");
  if (!(target > 0.0)) throw std::invalid_argument("DE target must be positive");
  if (stall_window < 1) throw std::invalid_argument("DE stall window must be positive");
}

void DeGraph::validate() const {
  if (edge_types < 1) throw std::invalid_argument("DE graph has no edge types");
  double w = 0.0;
  for (const auto& b : bits) {
    if (static_cast<int>(b.edges.size()) != edge_types) {
      throw std::invalid_argument("DE bit type '" + b.label + "' has a wrong edge table");
    }
    int total = 0;
    for (int e : b.edges) total += e;
    if (total < 2) throw std::invalid_argument("DE bit type '" + b.label + "' has fewer than 2 edges");
    w += b.weight;
  }
  if (std::abs(w - 1.0) > 1e-9) throw std::invalid_argument("DE bit weights do not sum to 1");
  for (const auto& win : windows) {
    for (const SlotKind& s : {win.on, win.off}) {
      if (s.edge_type < 0 || s.edge_type >= edge_types) {
        throw std::invalid_argument("DE window '" + win.name + "' references an unknown edge type");
      }
    }
    if (!(win.on_rate >= 0.0 && win.on_rate <= 1.0)) {
      throw std::invalid_argument("DE window '" + win.name + "' has an invalid on-rate");
    }
  }
}

int DeGraph::max_edges_per_bit() const {
  int m = 0;
  for (const auto& b : bits) {
    int t = 0;
    for (int e : b.edges) t += e;
    m = std::max(m, t);
  }
  return m;
}

DeGraph awgn_graph(const DegreeProfile& profile, double punctured_fraction) {
  DeGraph g;
  g.edge_types = 1;
  for (const auto& e : profile.entries()) {
    g.bits.push_back({"d" + std::to_string(e.degree), e.fraction, 0, {e.degree}});
  }
  g.windows.push_back({"rsc", {0, 0}, {0, -1}, 1.0 - punctured_fraction});
  g.validate();
  return g;
}

DeGraph multiplexed_graph(const DegreeProfile& profile) {
  // Edge types: 0 = RSC 1 / block-2 bit, 1 = RSC 1 / block-1 bit,
  //             2 = later constituents, transmitted parity (block-2 bit),
  //             3 = later constituents, punctured parity (block-1 bit copies).
  const double f2 = profile.fraction_of(2);
  if (f2 < 0.5 - 1e-12) throw std::invalid_argument("multiplexed ensemble needs f_2 >= 1/2");
  DeGraph g;
  g.edge_types = 4;
  g.bits.push_back({"blk2_d2", 0.5, 1, {1, 0, 1, 0}});
  for (const auto& e : profile.entries()) {
    const double w = e.degree == 2 ? e.fraction - 0.5 : e.fraction;
    if (w <= 1e-15) continue;
    g.bits.push_back({"blk1_d" + std::to_string(e.degree), w, 0, {0, 1, 0, e.degree - 1}});
  }
  double w = 0.0;
  for (const auto& b : g.bits) w += b.weight;
  for (auto& b : g.bits) b.weight /= w;
  const double later_rate = 1.0 / (2.0 * (profile.average_degree() - 1.0));
  g.windows.push_back({"rsc1", {1, 1}, {0, -1}, 0.5});
  g.windows.push_back({"later", {2, 0}, {3, -1}, later_rate});
  g.validate();
  return g;
}

LlrDensity density_from_channel(const LlrGrid& grid, double alpha, double noise_var) {
  return LlrDensity::from_channel(grid, alpha, noise_var);
}

std::vector<LlrDensity> checknode_transfer(const Trellis& trellis, const WindowType& window,
                                           std::span<const LlrDensity> apriori,
                                           const DeChannel& channel, const DeConfig& config,
                                           uint64_t seed) {
  config.validate();
  const int types = static_cast<int>(apriori.size());
  if (window.on.edge_type >= types || window.off.edge_type >= types) {
    throw std::invalid_argument("checknode_transfer: window uses an edge type without a-priori density");
  }
  const LlrGrid grid = config.grid;
  const AliasSampler on_apr(apriori[window.on.edge_type]);
  const AliasSampler off_apr(apriori[window.off.edge_type]);
  const ParitySource on_par = parity_source(channel, window.on.parity_block);
  const ParitySource off_par = parity_source(channel, window.off.parity_block);

  const int W = config.window;
  const int G = config.guard;
  const long long per_window = W - 2 * G;
  const auto windows = static_cast<std::size_t>((config.samples + per_window - 1) / per_window);
  const int workers = std::max(1, config.workers);

  // Per worker: counts for the on and off edge types.
  std::vector<std::vector<uint64_t>> on_counts(workers, std::vector<uint64_t>(grid.points(), 0));
  std::vector<std::vector<uint64_t>> off_counts(workers, std::vector<uint64_t>(grid.points(), 0));
  struct Scratch {
    std::vector<double> sys, par, apr, ext;
    std::vector<uint8_t> on;
    BcjrWorkspace ws;
  };
  std::vector<Scratch> scratch(workers);

  parallel_for(windows, workers, [&](std::size_t w, int t) {
    Scratch& s = scratch[t];
    s.sys.assign(W, 0.0);
    s.par.resize(W);
    s.apr.resize(W);
    s.ext.resize(W);
    s.on.resize(W);
    Rng rng(derive_seed(seed, {w}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double rate = window.on_rate;
    const auto phase = static_cast<double>(rng() % (1u << 20));
    for (int j = 0; j < W; ++j) {
      const double x = phase + j;
      const bool on = std::floor((x + 1.0) * rate) > std::floor(x * rate);
      s.on[j] = on;
      const ParitySource& ps = on ? on_par : off_par;
      s.par[j] = ps.erased ? 0.0 : ps.mean + ps.sd * gauss(rng);
      s.apr[j] = on ? on_apr(rng) : off_apr(rng);
    }
    bcjr(trellis, s.sys, s.par, s.apr, Boundary::kEquiprobable, s.ext, s.ws);
    auto& oc = on_counts[t];
    auto& fc = off_counts[t];
    for (int j = G; j < W - G; ++j) {
      (s.on[j] ? oc : fc)[grid.index_of(s.ext[j])]++;
    }
  });

  std::vector<uint64_t> on_total(grid.points(), 0);
  std::vector<uint64_t> off_total(grid.points(), 0);
  for (int t = 0; t < workers; ++t) {
    for (int k = 0; k < grid.points(); ++k) {
      on_total[k] += on_counts[t][k];
      off_total[k] += off_counts[t][k];
    }
  }
  std::vector<LlrDensity> out(types);
  auto emit = [&](int type, const std::vector<uint64_t>& counts) {
    for (auto c : counts) {
      if (c) {
        out[type] = LlrDensity::from_counts(grid, counts);
        return;
      }
    }
  };
  if (window.on.edge_type == window.off.edge_type) {
    for (int k = 0; k < grid.points(); ++k) on_total[k] += off_total[k];
    emit(window.on.edge_type, on_total);
  } else {
    emit(window.on.edge_type, on_total);
    emit(window.off.edge_type, off_total);
  }
  return out;
}

DeTrajectory evolve(const Trellis& trellis, const DeGraph& graph, const DeChannel& channel,
                    const DeConfig& config, uint64_t seed) {
  config.validate();
  graph.validate();
  const LlrGrid grid = config.grid;
  const int T = graph.edge_types;

  DeTrajectory traj;
  for (const auto& b : graph.bits) traj.labels.push_back(b.label);

  std::vector<LlrDensity> channel_density;
  for (double g : channel.gains) channel_density.push_back(LlrDensity::from_channel(grid, g, channel.noise_var));
  for (const auto& b : graph.bits) {
    if (b.channel_block >= static_cast<int>(channel_density.size())) {
      throw std::invalid_argument("evolve: bit type observes a missing channel block");
    }
  }

  std::vector<LlrDensity> extrinsic(T, LlrDensity::delta(grid, 0.0));
  std::vector<LlrDensity> apriori(T);
  FourierConvolver conv(grid, graph.max_edges_per_bit());

  std::vector<FourierConvolver::Spectrum> ch_spec;
  for (const auto& d : channel_density) ch_spec.push_back(conv.transform(d));

  for (int it = 0;; ++it) {
    std::vector<FourierConvolver::Spectrum> ext_spec;
    ext_spec.reserve(T);
    for (const auto& e : extrinsic) ext_spec.push_back(conv.transform(e));

    DeIterate rec;
    rec.iteration = it;
    rec.per_bit_type.resize(graph.bits.size());

    // a-priori per edge type: mixture over bit types weighted by edge count.
    std::vector<std::vector<std::pair<double, int>>> parts(T);
    std::vector<LlrDensity> partial;  // per (bit type, edge type) with edges
    partial.reserve(graph.bits.size() * T);
    std::vector<std::vector<int>> partial_index(graph.bits.size(), std::vector<int>(T, -1));
    for (std::size_t b = 0; b < graph.bits.size(); ++b) {
      const BitType& bt = graph.bits[b];
      for (int t = 0; t < T; ++t) {
        if (bt.edges[t] == 0) continue;
        std::vector<std::pair<const FourierConvolver::Spectrum*, int>> factors;
        factors.push_back({&ch_spec[bt.channel_block], 1});
        for (int u = 0; u < T; ++u) {
          const int n = bt.edges[u] - (u == t ? 1 : 0);
          if (n > 0) factors.push_back({&ext_spec[u], n});
        }
        double drift = 0.0;
        partial.push_back(conv.convolve(factors, &drift));
        traj.max_mass_drift = std::max(traj.max_mass_drift, drift);
        if (drift > kDriftLimit) throw std::logic_error("evolve: density mass drift exceeds 1e-9");
        partial_index[b][t] = static_cast<int>(partial.size()) - 1;
        parts[t].push_back({bt.weight * bt.edges[t], partial_index[b][t]});
      }
      // Partial APP through the first attached edge.
      const int ref = static_cast<int>(std::find_if(bt.edges.begin(), bt.edges.end(),
                                                    [](int e) { return e > 0; }) -
                                       bt.edges.begin());
      rec.per_bit_type[b] = partial[partial_index[b][ref]].error_probability();
    }
    double pb = 0.0;
    for (std::size_t b = 0; b < graph.bits.size(); ++b) pb += graph.bits[b].weight * rec.per_bit_type[b];
    rec.error_probability = pb;

    for (int t = 0; t < T; ++t) {
      if (parts[t].empty()) {
        apriori[t] = LlrDensity::delta(grid, 0.0);
        continue;
      }
      double wsum = 0.0;
      for (const auto& [w, idx] : parts[t]) wsum += w;
      std::vector<std::pair<double, const LlrDensity*>> mix;
      for (const auto& [w, idx] : parts[t]) mix.push_back({w / wsum, &partial[idx]});
      apriori[t] = mixture(mix);
      const double drift = apriori[t].normalize();
      traj.max_mass_drift = std::max(traj.max_mass_drift, drift);
      if (drift > kDriftLimit) throw std::logic_error("evolve: mixture mass drift exceeds 1e-9");
    }
    traj.iterates.push_back(std::move(rec));

    if (pb < config.target) {
      traj.verdict = DeVerdict::kConverged;
      break;
    }
    if (it >= config.stall_window) {
      const double before = traj.iterates[it - config.stall_window].error_probability;
      if (before - pb < config.stall_improvement * before) {
        traj.verdict = DeVerdict::kStalled;
        break;
      }
    }
    if (it >= config.max_iters) {
      traj.verdict = DeVerdict::kMaxIterations;
      break;
    }

    std::vector<LlrDensity> next(T);
    for (std::size_t w = 0; w < graph.windows.size(); ++w) {
      // Seeds depend on (iteration, window) only, so SNR probes share random numbers.
      auto out = checknode_transfer(trellis, graph.windows[w], apriori, channel, config,
                                    derive_seed(seed, {static_cast<uint64_t>(it), w}));
      for (int t = 0; t < T; ++t) {
        if (!out[t].mass().empty()) next[t] = std::move(out[t]);
      }
    }
    for (int t = 0; t < T; ++t) {
      if (!next[t].mass().empty()) extrinsic[t] = std::move(next[t]);
    }
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const DeTrajectory& t) {
  os << "iteration,P_b";
  for (const auto& l : t.labels) os << ",P_b_" << l;
  os << '\n';
  os.precision(10);
  for (const auto& it : t.iterates) {
    os << it.iteration << ',' << it.error_probability;
    for (double p : it.per_bit_type) os << ',' << p;
    os << '\n';
  }
}

ThresholdResult find_threshold(const Trellis& trellis, const DeGraph& graph, double rate,
                               const DeConfig& config, uint64_t seed, const ThresholdSearch& search) {
  if (search.precision_db < 0.01) throw std::invalid_argument("threshold precision must be >= 0.01 dB");
  ThresholdResult r;
  auto probe = [&](double db) {
    const DeChannel ch{{1.0, 1.0}, noise_variance_from_ebn0_db(db, rate)};
    const DeTrajectory t = evolve(trellis, graph, ch, config, seed);
    r.probes.push_back({db, t.converged(), t.iterations()});
    return t.converged();
  };
  double lo = search.lo_db;
  double hi = search.hi_db;
  if (probe(lo)) {
    std::ostringstream os;
    os << "threshold bracket invalid: DE converges at the lower end " << lo << " dB";
    throw std::runtime_error(os.str());
  }
  while (!probe(hi)) {
    lo = hi;
    hi += 1.0;
    if (hi > search.max_hi_db) throw std::runtime_error("threshold not found below max_hi_db");
  }
  while (hi - lo > search.precision_db) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) ? hi : lo) = mid;
  }
  r.lo_db = lo;
  r.hi_db = hi;
  r.threshold_db = 0.5 * (lo + hi);
  return r;
}

int deo_indicator(const Trellis& trellis, const DeGraph& graph, double alpha1, double alpha2,
                  double ebn0_db, double rate, const DeConfig& config, uint64_t seed) {
  if (alpha1 < 0.0 || alpha2 < 0.0) throw std::invalid_argument("deo_indicator: negative fading gain");
  const DeChannel ch{{alpha1, alpha2}, noise_variance_from_ebn0_db(ebn0_db, rate)};
  return evolve(trellis, graph, ch, config, seed).converged() ? 0 : 1;
}

}  // namespace turbofade
