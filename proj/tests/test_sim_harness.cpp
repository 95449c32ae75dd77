#include <gtest/gtest.h>

#include <sstream>

#include "turbofade/sim_harness.hpp"

using namespace turbofade;

namespace {

const Trellis& rsc1315() {
  static const Trellis t(RscSpec{013, 015, 3});
  return t;
}

CodeInstance make_code(int K, MultiplexerKind kind = MultiplexerKind::kDiagonal) {
  const auto p = validate_profile({{2, 0.9}, {12, 0.1}});
  return build_code(derive_code_params(p, 0.5, 0.5, K, 2), p, rsc1315(), 3, kind);
}

SimOptions small_run(int workers) {
  SimOptions o;
  o.stop = {20, 2000};
  o.decode.max_iters = 10;
  o.workers = workers;
  return o;
}

}  // namespace

TEST(Frame, ReplaysIdentically) {
  const auto code = make_code(256);
  for (uint64_t f = 0; f < 20; ++f) {
    const auto a = simulate_frame(code, ChannelMode::kBlockFading, 4.0, 99, f, {});
    const auto b = simulate_frame(code, ChannelMode::kBlockFading, 4.0, 99, f, {});
    EXPECT_EQ(a.bit_errors, b.bit_errors);
    EXPECT_EQ(a.iterations, b.iterations);
  }
}

TEST(Point, ParallelRunEqualsSequentialRun) {
  const auto code = make_code(256);
  const auto a = run_wer_point(code, ChannelMode::kBlockFading, 3.0, 5, small_run(1));
  const auto b = run_wer_point(code, ChannelMode::kBlockFading, 3.0, 5, small_run(3));
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.word_errors, b.word_errors);
  EXPECT_EQ(a.bit_errors, b.bit_errors);
  EXPECT_DOUBLE_EQ(a.mean_iterations, b.mean_iterations);
  EXPECT_EQ(a.word_errors, 20);
}

TEST(Point, StopRuleCountsMatchFrameReplay) {
  const auto code = make_code(128);
  const auto p = run_wer_point(code, ChannelMode::kBlockFading, 2.0, 17, small_run(2));
  long long we = 0, be = 0;
  for (long long f = 0; f < p.frames; ++f) {
    const auto o = simulate_frame(code, ChannelMode::kBlockFading, 2.0, 17, f, small_run(1).decode);
    we += o.bit_errors > 0;
    be += o.bit_errors;
  }
  EXPECT_EQ(we, p.word_errors);
  EXPECT_EQ(be, p.bit_errors);
  EXPECT_LE(p.wer_lower, p.wer);
  EXPECT_GE(p.wer_upper, p.wer);
}

TEST(Point, MaxFramesCapsCleanChannel) {
  const auto code = make_code(128);
  SimOptions o = small_run(1);
  o.stop = {100, 50};
  const auto p = run_wer_point(code, ChannelMode::kAwgn, 10.0, 1, o);
  EXPECT_EQ(p.frames, 50);
  EXPECT_EQ(p.word_errors, 0);
}

TEST(Sweep, StopsBelowTargetWer) {
  const auto code = make_code(128);
  SimOptions o = small_run(1);
  o.stop = {5, 200};
  o.stop_below_wer = 0.5;
  const double grid[] = {0.0, 6.0, 12.0, 18.0};
  const auto r = run_wer_sweep(code, ChannelMode::kAwgn, grid, 7, o);
  ASSERT_GE(r.points.size(), 1u);
  EXPECT_LT(r.points.size(), 4u);
  EXPECT_LE(r.points.back().wer, 0.5);
  EXPECT_EQ(r.points[0].seed, point_seed(7, 0.0));
}

TEST(Audit, DiagonalMultiplexerPassesAndSabotagedFails) {
  const auto good = run_erasure_audit(make_code(600), 20, 4, {}, 2);
  EXPECT_TRUE(good.passed());
  EXPECT_EQ(good.trials, 20);
  const auto bad = run_erasure_audit(make_code(600, MultiplexerKind::kSabotaged), 20, 4, {}, 2);
  EXPECT_FALSE(bad.passed());
  ASSERT_FALSE(bad.dumps.empty());
  EXPECT_GT(bad.dumps[0].bit_errors, 0);
}

TEST(Csv, HeaderAndRerunsAreByteIdentical) {
  const auto code = make_code(128);
  const double grid[] = {1.0, 2.0};
  auto render = [&] {
    SimOptions o = small_run(2);
    o.stop = {3, 100};
    const auto r = run_wer_sweep(code, ChannelMode::kBlockFading, grid, 11, o);
    std::ostringstream os;
    write_sim_csv(os, r, {{"seed", "11"}});
    return os.str();
  };
  const std::string a = render();
  EXPECT_EQ(a, render());
  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# seed: 11");
  std::getline(in, line);
  EXPECT_EQ(line, "# channel: block_fading");
  std::getline(in, line);
  EXPECT_EQ(line, "ebn0_db,frames,word_errors,bit_errors,wer,ber,wer_ci_low,wer_ci_high,mean_iterations,seed");
}
