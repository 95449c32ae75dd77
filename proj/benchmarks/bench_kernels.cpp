#include <benchmark/benchmark.h>

#include <random>

#include "turbofade/channel.hpp"
#include "turbofade/density_evolution.hpp"
#include "turbofade/llr_density.hpp"
#include "turbofade/sim_harness.hpp"

using namespace turbofade;

namespace {

const Trellis& rsc1315() {
  static const Trellis t(RscSpec{013, 015, 3});
  return t;
}

std::vector<double> noisy_llrs(std::size_t n, uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

void BM_Bcjr(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sys = noisy_llrs(n, 1), par = noisy_llrs(n, 2), apr = noisy_llrs(n, 3);
  std::vector<double> ext(n);
  BcjrWorkspace ws;
  for (auto _ : state) {
    bcjr(rsc1315(), sys, par, apr, Boundary::kEquiprobable, ext, ws);
    benchmark::DoNotOptimize(ext.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(n));
}
BENCHMARK(BM_Bcjr)->Arg(1000)->Arg(10000);

void BM_BitnodeUpdate(benchmark::State& state) {
  const LlrGrid g{40.0, static_cast<int>(state.range(0))};
  const auto ch = density_from_channel(g, 1.0, 0.9);
  const auto ex = LlrDensity::gaussian(g, 3.0, 6.0);
  const int degree = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(bitnode_update(ch, ex, degree));
}
BENCHMARK(BM_BitnodeUpdate)->Args({4096, 2})->Args({4096, 12});

void BM_Checknode(benchmark::State& state) {
  DeConfig cfg;
  cfg.samples = state.range(0);
  const auto graph = awgn_graph(validate_profile({{2, 0.9}, {12, 0.1}}), 2.0 / 3.0);
  const std::vector<LlrDensity> apr = {LlrDensity::gaussian(cfg.grid, 2.0, 4.0)};
  const DeChannel ch{{1.0}, noise_variance_from_ebn0_db(0.5, 0.5)};
  for (auto _ : state) benchmark::DoNotOptimize(checknode_transfer(rsc1315(), graph.windows[0], apr, ch, cfg, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Checknode)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_DecodeFrame(benchmark::State& state) {
  const auto p = validate_profile({{2, 0.9}, {12, 0.1}});
  const auto code = build_code(derive_code_params(p, 0.5, 0.5, 6000, 2), p, rsc1315(), 1);
  const double db = static_cast<double>(state.range(0)) / 10.0;
  uint64_t frame = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_frame(code, ChannelMode::kAwgn, db, 7, frame++, {}));
  }
}
BENCHMARK(BM_DecodeFrame)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
