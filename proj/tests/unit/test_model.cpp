#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hdlab/error.hpp"
#include "hdlab/model.hpp"

using namespace hdlab;

TEST(ParameterPoint, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(ParameterPoint(std::vector<double>{}), Error);
  EXPECT_THROW(ParameterPoint(std::vector<double>{1.0, NAN}), Error);
  EXPECT_THROW(ParameterPoint(std::vector<double>{INFINITY}), Error);
  const ParameterPoint theta({3.0, 4.0});
  EXPECT_EQ(theta.dim(), 2u);
  EXPECT_DOUBLE_EQ(theta.norm(), 5.0);
}

TEST(DrawObservation, DeterministicForFixedStream) {
  const auto theta = ParameterPoint::zero(17);
  const RngStream rng(2024, 5);
  const auto a = draw_observation(theta, rng);
  const auto b = draw_observation(theta, rng);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, draw_observation(theta, rng.child(1)));
}

TEST(DrawObservation, MeanOfShiftedCoordinate) {
  std::vector<double> v(3, 0.0);
  v[0] = 5.0;
  const ParameterPoint theta(v);
  constexpr int n = 100000;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += draw_observation(theta, RngStream(7, 0).child(j))[0];
  EXPECT_NEAR(sum / n, 5.0, 4.0 / std::sqrt(double(n)));
}

TEST(DrawObservation, SampleVarianceInHighDimension) {
  const auto y = draw_observation(ParameterPoint::zero(10000), RngStream(11, 0));
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= y.size();
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double var = ss / (y.size() - 1);
  EXPECT_GE(var, 0.95);
  EXPECT_LE(var, 1.05);
}

TEST(DrawObservation, NoiseMomentsPerCoordinate) {
  constexpr std::size_t d = 100;
  constexpr int n = 100000;
  std::vector<double> theta_values(d);
  for (std::size_t i = 0; i < d; ++i) theta_values[i] = 0.1 * double(i);
  const ParameterPoint theta(theta_values);
  std::vector<double> m1(d, 0.0), m2(d, 0.0), y(d);
  for (int j = 0; j < n; ++j) {
    draw_observation(theta.values(), RngStream(3, 9).child(j), y);
    for (std::size_t i = 0; i < d; ++i) {
      const double z = y[i] - theta[i];
      m1[i] += z;
      m2[i] += z * z;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    const double mean = m1[i] / n;
    const double var = m2[i] / n - mean * mean;
    EXPECT_LT(std::fabs(mean), 4.0 / std::sqrt(double(n))) << "coordinate " << i;
    EXPECT_LT(std::fabs(var - 1.0), 5.0 * std::sqrt(2.0 / n)) << "coordinate " << i;
  }
}

TEST(RealizeAlternative, Families) {
  const auto spike = realize_alternative(AlternativeRule::sparse_spike(1, DimensionRule::constant(2.5)), 8);
  EXPECT_EQ(std::vector<double>(spike.values().begin(), spike.values().end()),
            (std::vector<double>{2.5, 0, 0, 0, 0, 0, 0, 0}));

  const auto dense = realize_alternative(AlternativeRule::dense(1.0, 0.0), 4);
  EXPECT_EQ(std::vector<double>(dense.values().begin(), dense.values().end()),
            (std::vector<double>{1, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(dense.squared_norm(), 4.0);

  EXPECT_EQ(realize_alternative(AlternativeRule::zero(), 5).squared_norm(), 0.0);

  const auto custom = AlternativeRule::custom({{2, {1.0, -1.0}}});
  EXPECT_DOUBLE_EQ(realize_alternative(custom, 2)[1], -1.0);
  EXPECT_THROW(realize_alternative(custom, 3), Error);
  EXPECT_THROW(AlternativeRule::custom({{2, {1.0}}}), Error);
}

TEST(RealizeAlternative, SpikeCountAboveDimensionIsInvalid) {
  EXPECT_THROW(realize_alternative(AlternativeRule::sparse_spike(9, DimensionRule::constant(1.0)), 8),
               Error);
}

TEST(RealizeAlternative, SpikeAmplitudeRule) {
  // d^{1/(2p)} ln d at p = 4, d = 16: 16^{1/8} = sqrt(2), ln 16 = 4 ln 2.
  const DimensionRule amplitude{1.0, 1.0 / 8.0, 1.0};
  const auto theta = realize_alternative(AlternativeRule::sparse_spike(1, amplitude), 16);
  const double expected = std::sqrt(2.0) * 4.0 * std::log(2.0);
  EXPECT_NEAR(theta[0], expected, 1e-14);
  EXPECT_NEAR(theta[0], 3.92103, 1e-5);
}

TEST(RealizeAlternative, Deterministic) {
  const auto rule = AlternativeRule::dense(DimensionRule{0.7, -0.25, 0.5});
  for (std::size_t d : {1u, 2u, 100u, 4096u}) {
    const auto a = realize_alternative(rule, d);
    const auto b = realize_alternative(rule, d);
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    EXPECT_EQ(a.dim(), d);
  }
}

TEST(ConsistencyDiagnostics, ZeroAndDense) {
  const auto grid = default_d_grid();
  ASSERT_EQ(grid.front(), 16u);
  ASSERT_EQ(grid.back(), 4096u);
  const auto zero = consistency_diagnostics(AlternativeRule::zero(), 4.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(zero.lr_criterion[i], 0.0);
    EXPECT_EQ(zero.p_criterion[i], 0.0);
  }
  const auto dense = consistency_diagnostics(AlternativeRule::dense(1.0, 0.0), 4.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(dense.lr_criterion[i], std::sqrt(double(grid[i])), 1e-12 * grid[i]);
  }
}

TEST(ConsistencyDiagnostics, SpikeAtLrBoundary) {
  // a_d = d^{1/4}: ||theta||_2^2 = sqrt(d), ||theta||_4^4 = d.
  const auto grid = default_d_grid();
  const auto diag = consistency_diagnostics(
      AlternativeRule::sparse_spike(1, DimensionRule{1.0, 0.25, 0.0}), 4.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = double(grid[i]);
    EXPECT_NEAR(diag.lr_criterion[i], 1.0, 1e-12);
    EXPECT_NEAR(diag.p_criterion[i], std::sqrt(d), 1e-12 * std::sqrt(d));
  }
  EXPECT_FALSE(grows_on_grid(diag.lr_criterion));
  EXPECT_TRUE(grows_on_grid(diag.p_criterion));
}

TEST(ConsistencyDiagnostics, SpikeWherePCriterionDominates) {
  // a_d = d^{1/8} ln d at p = 4: p criterion (ln d)^4, LR criterion (ln d)^2 / d^{1/4}.
  const auto grid = default_d_grid();
  const auto diag = consistency_diagnostics(
      AlternativeRule::sparse_spike(1, DimensionRule{1.0, 0.125, 1.0}), 4.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = double(grid[i]);
    const double ld = std::log(d);
    EXPECT_NEAR(diag.p_criterion[i], std::pow(ld, 4), 1e-12 * std::pow(ld, 4));
    EXPECT_NEAR(diag.lr_criterion[i], ld * ld / std::pow(d, 0.25), 1e-12 * ld * ld);
  }
  // The ratio LR/p shrinks along the grid.
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_LT(diag.lr_criterion[i] / diag.p_criterion[i],
              diag.lr_criterion[i - 1] / diag.p_criterion[i - 1]);
  }
}

TEST(ConsistencyDiagnostics, AgreesWithRecomputationAndDominance) {
  const std::vector<AlternativeRule> rules{
      AlternativeRule::zero(), AlternativeRule::dense(0.3, -0.2),
      AlternativeRule::dense(DimensionRule{1.0, -0.25, 0.5}),
      AlternativeRule::sparse_spike(3, DimensionRule{2.0, 0.1, 0.0}),
      AlternativeRule::sparse_spike(1, DimensionRule{0.5, 0.0, 1.0})};
  const auto grid = default_d_grid();
  for (const auto& rule : rules) {
    for (double p : {0.5, 1.0, 3.0, 4.0, 8.0}) {
      const auto diag = consistency_diagnostics(rule, p, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto theta = realize_alternative(rule, grid[i]);
        double l2 = 0.0, lp = 0.0;
        for (double v : theta.values()) {
          l2 += v * v;
          lp += std::pow(std::fabs(v), p);
        }
        const double s = std::sqrt(double(grid[i]));
        EXPECT_NEAR(diag.lr_criterion[i], l2 / s, 1e-12 * std::max(1.0, l2 / s));
        EXPECT_NEAR(diag.p_criterion[i], std::max(l2, lp) / s,
                    1e-12 * std::max(1.0, std::max(l2, lp) / s));
        EXPECT_GE(diag.p_criterion[i], diag.lr_criterion[i]);
        EXPECT_GE(diag.lr_criterion[i], 0.0);
      }
    }
  }
}

TEST(ConsistencyDiagnostics, GridMustIncrease) {
  const std::vector<std::size_t> bad{16, 16, 32};
  EXPECT_THROW(consistency_diagnostics(AlternativeRule::zero(), 2.0, bad), Error);
}
