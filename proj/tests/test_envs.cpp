#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "bmo/envs.hpp"

using bmo::DyadicCube;
using bmo::Point;

TEST(Builtin, Log1dShiftAndMeans) {
  const auto env = bmo::builtin("log1d", 0.0);
  EXPECT_EQ(env.mean_shift(), 1.0);
  // <ln(1/x)>_(0,c] = 1 + ln(1/c) from the antiderivative x - x ln x.
  const auto m = env.cube_mean(DyadicCube(1, {0}));
  EXPECT_NEAR(m.value + env.mean_shift(), 1.6931471805599454, 1e-12);
  EXPECT_EQ(m.std_error, 0.0);
  EXPECT_NEAR(env.cube_mean(DyadicCube::root(1)).value, 0.0, 1e-12);
}

TEST(Builtin, Log2xMeansOnInitialSegments) {
  const auto env = bmo::builtin("log2x", 0.0);
  for (int k : {1, 3, 7}) {
    const double x = std::ldexp(1.0, -k);
    EXPECT_NEAR(env.cube_mean(DyadicCube(k, {0})).value + env.mean_shift(),
                2.0 + 2.0 * std::log(1.0 / x), 1e-12);
  }
}

TEST(Builtin, Log1dLevelSetMeasure) {
  const auto env = bmo::builtin("log1d", 0.0);
  for (double z : {0.0, 0.5, 1.0, 3.0, 9.0}) {
    EXPECT_NEAR(env.level_set_measure(z - env.mean_shift()), std::exp(-z), 1e-14);
  }
  EXPECT_EQ(env.level_set_measure(-1e6), 1.0);
}

TEST(Builtin, LevelSetMeasureIsNonincreasing) {
  for (const char* name : {"log1d", "himmelblau", "styblinski"}) {
    const auto env = bmo::builtin(name, 0.0);
    double prev = 1.0;
    for (double z = -12.0; z <= 12.0; z += 0.05) {
      const double g = env.level_set_measure(z);
      EXPECT_LE(g, prev) << name << " z=" << z;
      prev = g;
    }
  }
}

TEST(Builtin, ConstantEnv) {
  const auto env = bmo::builtin("constant", 0.0, 3);
  EXPECT_EQ(env.dim(), 3u);
  EXPECT_EQ(env.cube_mean(DyadicCube(2, {1, 2, 3})).value, 0.0);
  EXPECT_EQ(env.level_set_measure(-0.5), 1.0);
  EXPECT_EQ(env.level_set_measure(0.0), 0.0);
}

TEST(Builtin, UnknownNameThrows) {
  EXPECT_THROW(bmo::builtin("rosenbrock"), std::invalid_argument);
}

TEST(Builtin, BenchmarksAreMeanZeroAndInRange) {
  for (const char* name : {"himmelblau", "styblinski"}) {
    const auto env = bmo::builtin(name, 0.0);
    EXPECT_EQ(env.dim(), 2u);
    EXPECT_NEAR(env.cube_mean(DyadicCube::root(2)).value, 0.0, 1e-9) << name;
    bmo::Rng rng(11);
    for (int i = 0; i < 20000; ++i) {
      const double raw = env.f(DyadicCube::root(2).sample_uniform(rng)) + env.mean_shift();
      ASSERT_GE(raw, 0.0) << name;
      ASSERT_LE(raw, 10.0) << name;
    }
    EXPECT_NEAR(*env.finite_max() + env.mean_shift(), 10.0, 1e-9);
  }
}

TEST(Builtin, ExactMeanMatchesQuadrature) {
  const auto env = bmo::builtin("styblinski", 0.0);
  const DyadicCube q(3, {2, 5});
  const double exact = env.cube_mean(q).value;
  bmo::Rng rng(5);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += env.f(q.sample_uniform(rng));
  EXPECT_NEAR(sum / n, exact, 0.01);
}

TEST(Environment, NoiseIsBoundedAndCentred) {
  const auto env = bmo::builtin("log1d", 0.5);
  bmo::Rng rng(1);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = env.noise(rng);
    ASSERT_LE(std::abs(e), 0.5);
    sum += e;
  }
  const double sigma = 0.5 / std::sqrt(3.0);
  EXPECT_NEAR(sum / n, 0.0, 3.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST(Environment, NoiselessObservationIsExact) {
  const auto env = bmo::builtin("log2x", 0.0);
  bmo::Rng rng(2);
  const Point a{0.3};
  EXPECT_EQ(env.observe(a, rng), env.f(a));
}

TEST(Environment, SingularArmIsRedrawn) {
  const auto env = bmo::builtin("log1d", 0.0);
  EXPECT_TRUE(env.singular_at(Point{0.0}));
  EXPECT_FALSE(env.singular_at(Point{0.25}));
  bmo::Rng rng(9);
  const DyadicCube tiny(bmo::kMaxDepth, {0});
  for (int i = 0; i < 100; ++i) {
    const auto a = env.draw_arm(tiny, rng);
    EXPECT_TRUE(tiny.contains(a));
    EXPECT_TRUE(std::isfinite(env.f(a)));
  }
}

TEST(Environment, NoiseStreamIsReplayable) {
  const auto env = bmo::builtin("himmelblau", 0.1);
  bmo::Rng a(77), b(77);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(env.noise(a), env.noise(b));
}

TEST(Environment, ShiftMovesMeansAndLevels) {
  const auto env = bmo::builtin("log1d", 0.0);
  const auto up = env.shifted(2.5);
  const DyadicCube q(2, {1});
  EXPECT_NEAR(up.cube_mean(q).value, env.cube_mean(q).value + 2.5, 1e-12);
  EXPECT_NEAR(up.level_set_measure(1.7), env.level_set_measure(1.7 - 2.5), 1e-14);
}

TEST(Environment, QuadratureNeedsBudget) {
  const auto env = bmo::builtin("log1d", 0.0);
  EXPECT_THROW(env.cube_mean(DyadicCube::root(1), 0), std::invalid_argument);
}

TEST(Halton, FirstPoints) {
  const auto p = bmo::halton(1, 2);
  EXPECT_EQ(p[0], 0.5);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
}
