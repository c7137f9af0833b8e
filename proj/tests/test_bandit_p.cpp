#include <gtest/gtest.h>

#include <cmath>

#include "bmo/bandit_p.hpp"

using bmo::DyadicCube;
using bmo::PartitionState;
using bmo::Point;

namespace {

// Psi = 4 + ln 4 and C = Psi sqrt(2 ln 4): the root splits at 42 samples,
// its halves only after 168 samples each.
bmo::IndexParams small_params() { return bmo::IndexParams::make(1, 0.5, 0.25, 0.0, 1); }

}  // namespace

TEST(PartitionState, FreshRootDoesNotSplitWhenBonusIsTiny) {
  PartitionState s(bmo::IndexParams::make(100, 0.01, 0.999, 0.1, 2));
  EXPECT_EQ(s.leaves().size(), 1u);
  EXPECT_EQ(s.select_cube(), DyadicCube::root(2));
}

TEST(PartitionState, RootSplitsExactlyWhenRadiusFallsBelowBonus) {
  const auto p = small_params();
  const double c = p.full_radius();
  const auto threshold = static_cast<int>(std::floor(std::pow(c / std::log(4.0), 2))) + 1;
  ASSERT_EQ(threshold, 42);
  PartitionState s(p);
  for (int i = 0; i < threshold - 1; ++i) s.record(Point{i % 2 ? 0.75 : 0.25}, 0.0);
  EXPECT_EQ(s.refine(), 0u);
  s.record(Point{0.75}, 0.0);
  EXPECT_EQ(s.refine(), 1u);
  EXPECT_EQ(s.partition(), DyadicCube::root(1).direct_subcubes());
}

TEST(PartitionState, SelectsLargerIndexAndBreaksTiesByOrder) {
  PartitionState better_right(small_params());
  PartitionState tie(small_params());
  for (int i = 0; i < 21; ++i) {
    better_right.record(Point{0.25}, 3.0);
    better_right.record(Point{0.75}, 5.0);
    tie.record(Point{0.25}, 1.0);
    tie.record(Point{0.75}, 1.0);
  }
  better_right.refine();
  tie.refine();
  ASSERT_EQ(better_right.leaves().size(), 2u);
  EXPECT_EQ(better_right.select_cube(), DyadicCube(1, {1}));
  EXPECT_EQ(tie.select_cube(), DyadicCube(1, {0}));
}

TEST(PartitionState, ConstantNoiselessEnvObservesZero) {
  const auto env = bmo::builtin("constant", 0.0, 1);
  PartitionState s(bmo::IndexParams::make(50, 0.01, 0.01, 0.0, 1));
  bmo::Rng rng(1);
  for (int t = 1; t <= 50; ++t) {
    const auto row = s.step(env, rng);
    EXPECT_EQ(row.t, t);
    EXPECT_EQ(row.y, 0.0);
    EXPECT_TRUE(row.cube.contains(row.arm));
  }
}

TEST(RunPartition, ReplayIsIdentical) {
  const auto env = bmo::builtin("log1d", 0.1);
  const bmo::AlgoConfig cfg{300, 0.01, 0.01, 1.0};
  const auto a = bmo::run_partition(cfg, env, 9);
  const auto b = bmo::run_partition(cfg, env, 9);
  ASSERT_EQ(a.rows.size(), 300u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].cube, b.rows[i].cube);
    EXPECT_EQ(a.rows[i].arm, b.rows[i].arm);
    EXPECT_EQ(a.rows[i].y, b.rows[i].y);
  }
  const auto c = bmo::run_partition(cfg, env, 10);
  EXPECT_NE(a.rows.front().arm, c.rows.front().arm);
}

TEST(RunPartition, ZeroHorizonGivesEmptyTrace) {
  const auto trace = bmo::run_partition({0, 0.01, 0.001, 1.0}, bmo::builtin("log1d"), 1);
  EXPECT_TRUE(trace.rows.empty());
  EXPECT_EQ(trace.algo, "p");
}

TEST(RunPartition, ObserverSeesEveryStep) {
  const auto env = bmo::builtin("log2x", 0.1);
  std::int64_t calls = 0;
  bmo::run_partition({120, 0.1, 0.05, 1.0}, env, 2,
                     [&](const PartitionState& s, const bmo::TraceRow& row) {
                       ++calls;
                       EXPECT_EQ(s.step_count(), row.t);
                       EXPECT_EQ(row.n_cubes, s.leaves().size());
                     });
  EXPECT_EQ(calls, 120);
}

TEST(RunPartition, FinalCubesArePartition) {
  const auto trace = bmo::run_partition({2000, 0.5, 0.01, 1.0}, bmo::builtin("log1d", 0.0), 3);
  EXPECT_TRUE(bmo::check_partition(trace.final_cubes).ok());
  EXPECT_GT(trace.final_cubes.size(), 1u);
}
