#include <gtest/gtest.h>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "hdlab/error.hpp"
#include "hdlab/hypothesis_tests.hpp"
#include "hdlab/special.hpp"

using namespace hdlab;

namespace {

const PNormFamily kLr{2.0};
const PNormFamily kMax{kInf};

double phi(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }

}  // namespace

TEST(PNorm, BasicValues) {
  EXPECT_DOUBLE_EQ(p_norm(std::vector<double>{3, 4}, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(p_norm(std::vector<double>{1, -2, 3}, kInf), 3.0);
  EXPECT_DOUBLE_EQ(p_norm(std::vector<double>{1, 1, 1, 1}, 1.0), 4.0);
  EXPECT_NEAR(p_norm(std::vector<double>{1, 1, 1, 1}, 0.5), 16.0, 1e-12);
  EXPECT_EQ(p_norm(std::vector<double>{0, 0}, 3.0), 0.0);
  EXPECT_THROW(p_norm(std::vector<double>{1.0}, 0.0), Error);
  EXPECT_THROW(p_norm(std::vector<double>{1.0}, -2.0), Error);
}

TEST(PNorm, OverflowAndUnderflowSafe) {
  const std::vector<double> big{1e200, 1e200};
  EXPECT_NEAR(p_norm(big, 4.0) / 1e200, std::pow(2.0, 0.25), 1e-14);
  EXPECT_NEAR(p_norm(big, 2.0) / 1e200, std::sqrt(2.0), 1e-14);
  const std::vector<double> tiny{1e-200, 1e-200, 1e-200};
  EXPECT_NEAR(p_norm(tiny, 8.0) / 1e-200, std::pow(3.0, 0.125), 1e-14);
  const std::vector<double> large_p{2.0, 1.0};
  EXPECT_NEAR(p_norm(large_p, 2000.0), 2.0, 1e-12);
}

TEST(PNorm, MonotoneUnderCoordinateGrowth) {
  const RngStream rng(31, 0);
  for (int trial = 0; trial < 500; ++trial) {
    RngCursor c(rng.child(trial));
    const std::size_t d = 1 + static_cast<std::size_t>(c.next_uniform() * 20);
    std::vector<double> x(d);
    for (auto& v : x) v = 3.0 * c.next_normal();
    const double p = std::vector<double>{0.5, 1.0, 2.0, 3.0, 4.0, 8.0, kInf}[trial % 7];
    const double before = p_norm(x, p);
    const std::size_t i = static_cast<std::size_t>(c.next_uniform() * d);
    x[i] = (x[i] < 0 ? -1.0 : 1.0) * (std::fabs(x[i]) + std::fabs(c.next_normal()));
    EXPECT_GE(p_norm(x, p), before * (1.0 - 1e-15)) << "p=" << p;
  }
}

TEST(PNorm, OrderedInExponent) {
  const RngStream rng(77, 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(10);
    RngCursor c(rng.child(trial));
    for (auto& v : x) v = c.next_normal();
    double previous = kInf;
    for (double p : {0.5, 1.0, 2.0, 3.0, 4.0, 8.0, kInf}) {
      const double value = p_norm(x, p);
      EXPECT_LE(value, previous * (1.0 + 1e-14));
      previous = value;
    }
  }
}

TEST(Calibration, ExactMaxTestAtDimensionOne) {
  const auto result = calibrate_critical_value(kMax, 1, 0.05, {CalibrationMethod::exact}, {});
  EXPECT_NEAR(result.critical_value, 1.959964, 5e-7);
  EXPECT_EQ(result.critical_value_error, 0.0);
}

TEST(Calibration, ExactLrTestAtDimensionTwo) {
  const auto result = calibrate_critical_value(kLr, 2, 0.05, {CalibrationMethod::exact}, {});
  EXPECT_NEAR(result.critical_value, std::sqrt(-2.0 * std::log(0.05)), 1e-9);
  EXPECT_NEAR(result.critical_value, 2.44775, 1e-5);
}

TEST(Calibration, ExactMaxTestClosedFormLargeDimension) {
  const boost::math::normal_distribution<double> n01;
  for (std::size_t d : {10u, 100u, 4096u}) {
    const double expected = boost::math::quantile(n01, (1.0 + std::pow(0.95, 1.0 / d)) / 2.0);
    EXPECT_NEAR(calibrate_critical_value(kMax, d, 0.05, {CalibrationMethod::exact}, {}).critical_value,
                expected, 1e-9);
  }
}

TEST(Calibration, UnsupportedPairingsAndInsufficientBudget) {
  const RngStream rng(1, 1);
  try {
    calibrate_critical_value(PNormFamily{4.0}, 10, 0.05, {CalibrationMethod::exact}, rng);
    FAIL() << "expected invalid input";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
  }
  EXPECT_THROW(calibrate_critical_value(HigherCriticismFamily{}, 10, 0.05,
                                        {CalibrationMethod::clt_approx}, rng),
               Error);
  EXPECT_THROW(calibrate_critical_value(kMax, 10, 0.05, {CalibrationMethod::clt_approx}, rng),
               Error);
  try {
    calibrate_critical_value(PNormFamily{4.0}, 10, 0.05, {CalibrationMethod::monte_carlo, 399}, rng);
    FAIL() << "expected calibration-insufficient";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::calibration_insufficient);
  }
  EXPECT_THROW(calibrate_critical_value(kLr, 10, 1.0, {CalibrationMethod::exact}, rng), Error);
}

TEST(Calibration, MonteCarloMatchesExactForLrTest) {
  const RngStream rng(5, 0);
  const auto mc = calibrate_critical_value(kLr, 20, 0.05, {CalibrationMethod::monte_carlo, 200000}, rng);
  const auto exact = calibrate_critical_value(kLr, 20, 0.05, {CalibrationMethod::exact}, rng);
  EXPECT_GT(mc.critical_value_error, 0.0);
  EXPECT_NEAR(mc.size_error, std::sqrt(0.05 * 0.95 / 200000), 1e-15);
  EXPECT_LT(std::fabs(mc.critical_value - exact.critical_value), 4.0 * mc.critical_value_error);
}

TEST(Calibration, MonteCarloAgreesWithCltAtModerateDimension) {
  const RngStream rng(2718, 0);
  const PNormFamily p4{4.0};
  const auto mc = calibrate_critical_value(p4, 64, 0.05, {CalibrationMethod::monte_carlo, 1000000}, rng);
  const auto clt = calibrate_critical_value(p4, 64, 0.05, {CalibrationMethod::clt_approx}, rng);
  const double se = std::hypot(mc.critical_value_error, clt.critical_value_error);
  EXPECT_LE(std::fabs(mc.critical_value - clt.critical_value), 3.0 * se)
      << "mc=" << mc.critical_value << " clt=" << clt.critical_value << " se=" << se;
}

TEST(Calibration, WorkerCountDoesNotChangeMonteCarlo) {
  const RngStream rng(8, 8);
  const auto a = calibrate_critical_value(HigherCriticismFamily{}, 16, 0.1,
                                          {CalibrationMethod::monte_carlo, 5000}, rng, 1);
  const auto b = calibrate_critical_value(HigherCriticismFamily{}, 16, 0.1,
                                          {CalibrationMethod::monte_carlo, 5000}, rng, 3);
  EXPECT_EQ(a.critical_value, b.critical_value);
  EXPECT_EQ(a.critical_value_error, b.critical_value_error);
}

TEST(Evaluate, ZeroObservationAndClosedBoundary) {
  const TestSpec lr(kLr, 4, 1.5, 0.05);
  EXPECT_EQ(evaluate(lr, std::vector<double>(4, 0.0)), 0);
  const TestSpec at_boundary(kLr, 2, 5.0, 0.05);
  EXPECT_EQ(evaluate(at_boundary, std::vector<double>{3.0, 4.0}), 1);
  EXPECT_EQ(evaluate(at_boundary, std::vector<double>{3.0, 3.99}), 0);
  EXPECT_THROW(evaluate(lr, std::vector<double>(3, 0.0)), Error);
}

TEST(Evaluate, CombinedIsOrRule) {
  const TestSpec primary(kLr, 2, 1.0, 0.05);
  const TestSpec enhancement(kMax, 2, 10.0, 0.001);
  const auto combined = combine(primary, enhancement);
  EXPECT_EQ(evaluate(combined, std::vector<double>{1.0, 1.0}), 1);  // primary only
  EXPECT_EQ(evaluate(combined, std::vector<double>{0.1, 0.1}), 0);
  const TestSpec strong(kMax, 2, 0.05, 0.5);
  EXPECT_EQ(evaluate(combine(TestSpec(kLr, 2, 100.0, 0.0), strong), std::vector<double>{0.1, 0.0}), 1);
  EXPECT_NEAR(combined.alpha(), 0.051, 1e-15);
  EXPECT_THROW(combine(primary, TestSpec(kMax, 3, 1.0, 0.05)), Error);
}

TEST(Combine, NeverRejectingEnhancementIsTransparent) {
  const TestSpec primary(PNormFamily{4.0}, 6, 2.2, 0.05);
  const auto combined = combine(primary, TestSpec(kMax, 6, kInf, 0.0));
  const RngStream rng(99, 1);
  for (int i = 0; i < 2000; ++i) {
    const auto y = draw_observation(ParameterPoint::zero(6), rng.child(i));
    EXPECT_EQ(evaluate(combined, y), evaluate(primary, y));
  }
}

TEST(Combine, SizeUnionBoundAndPathwisePower) {
  const std::size_t d = 32;
  const RngStream rng(404, 0);
  const auto primary = make_calibrated_test(kLr, d, 0.05, {CalibrationMethod::exact}, rng);
  const auto enhancement = make_calibrated_test(kMax, d, 0.01, {CalibrationMethod::exact}, rng);
  const auto combined = combine(primary, enhancement);

  const auto zero = ParameterPoint::zero(d);
  const auto size_c = estimate_power(combined, zero, 100000, rng.child(1));
  const auto size_p = estimate_power(primary, zero, 100000, rng.child(2));
  const auto size_e = estimate_power(enhancement, zero, 100000, rng.child(3));
  const double se = std::sqrt(size_c.standard_error * size_c.standard_error +
                              size_p.standard_error * size_p.standard_error +
                              size_e.standard_error * size_e.standard_error);
  EXPECT_LE(size_c.estimate, size_p.estimate + size_e.estimate + 4.0 * se);

  std::vector<double> spike(d, 0.0);
  spike[0] = 4.0;
  const ParameterPoint theta(spike);
  const auto common = rng.child(4);
  const auto pc = estimate_power(combined, theta, 20000, common);
  const auto pp = estimate_power(primary, theta, 20000, common);
  const auto pe = estimate_power(enhancement, theta, 20000, common);
  EXPECT_GE(pc.rejections, pp.rejections);
  EXPECT_GE(pc.rejections, pe.rejections);
}

TEST(HigherCriticism, DegenerateAndExtremeInputs) {
  EXPECT_EQ(higher_criticism_statistic(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_GT(higher_criticism_statistic(std::vector<double>{10.0, 0.0}), 1e10);
  EXPECT_TRUE(std::isinf(higher_criticism_statistic(std::vector<double>{60.0, 0.0})));
  EXPECT_THROW(higher_criticism_statistic(std::vector<double>{1.0}), Error);
  // Monotone in the most extreme coordinate.
  double previous = 0.0;
  for (double a = 2.0; a <= 8.0; a += 0.5) {
    const double value = higher_criticism_statistic(std::vector<double>{a, 0.3, -0.2, 0.1});
    EXPECT_GE(value, previous);
    previous = value;
  }
}

TEST(HigherCriticism, MatchesDirectFormula) {
  const std::vector<double> y{2.5, -0.3, 1.1, 0.05, -3.2, 0.7};
  std::vector<double> pv;
  for (double v : y) pv.push_back(2.0 * (1.0 - phi(std::fabs(v))));
  std::sort(pv.begin(), pv.end());
  const double d = 6.0;
  double best = 0.0;
  for (int i = 1; i <= 3; ++i) {
    const double p = pv[i - 1];
    best = std::max(best, std::sqrt(d) * (i / d - p) / std::sqrt(p * (1 - p)));
  }
  EXPECT_NEAR(higher_criticism_statistic(y), best, 1e-12);
}

TEST(HigherCriticism, MonteCarloCalibrationReproducibleAcrossSeeds) {
  const auto a = calibrate_critical_value(HigherCriticismFamily{}, 64, 0.05,
                                          {CalibrationMethod::monte_carlo, 100000}, RngStream(1, 0));
  const auto b = calibrate_critical_value(HigherCriticismFamily{}, 64, 0.05,
                                          {CalibrationMethod::monte_carlo, 100000}, RngStream(2, 0));
  EXPECT_LE(std::fabs(a.critical_value - b.critical_value),
            2.0 * std::hypot(a.critical_value_error, b.critical_value_error));
}

TEST(EstimatePower, ExactSizeUnderNull) {
  const std::size_t d = 10;
  const auto spec = make_calibrated_test(kLr, d, 0.05, {CalibrationMethod::exact}, {});
  const auto est = estimate_power(spec, ParameterPoint::zero(d), 100000, RngStream(10, 0));
  EXPECT_LE(est.ci_lower, 0.05);
  EXPECT_GE(est.ci_upper, 0.05);
  EXPECT_LE(est.standard_error, 0.5 / std::sqrt(100000.0));
  EXPECT_LE(est.ci_lower, est.estimate);
  EXPECT_GE(est.ci_upper, est.estimate);
}

TEST(EstimatePower, AgreesWithLrOracle) {
  const std::size_t d = 25;
  const auto spec = make_calibrated_test(kLr, d, 0.05, {CalibrationMethod::exact}, {});
  std::vector<double> v(d, 0.0);
  v[0] = 2.0;
  v[3] = 2.0;
  const ParameterPoint theta(v);
  const auto est = estimate_power(spec, theta, 100000, RngStream(12, 0));
  const double beta = lr_power_beta({d, 0.05, theta.norm()});
  EXPECT_LE(std::fabs(est.estimate - beta), 4.0 * est.standard_error);
}

TEST(EstimatePower, HugeSignalIsAlwaysDetected) {
  const std::size_t d = 10;
  const auto spec = make_calibrated_test(kLr, d, 0.05, {CalibrationMethod::exact}, {});
  std::vector<double> v(d, 0.0);
  v[0] = 100.0;
  const auto est = estimate_power(spec, ParameterPoint(v), 10000, RngStream(13, 0));
  EXPECT_GE(est.estimate, 0.999);
  EXPECT_GE(lr_power_beta({d, 0.05, 100.0}), 0.999);
}

TEST(EstimatePower, RotationalInvarianceOfLrPower) {
  const std::size_t d = 40;
  const auto spec = make_calibrated_test(kLr, d, 0.05, {CalibrationMethod::exact}, {});
  std::vector<double> spike(d, 0.0), dense(d, 3.0 / std::sqrt(double(d)));
  spike[0] = 3.0;
  const auto a = estimate_power(spec, ParameterPoint(spike), 50000, RngStream(20, 0));
  const auto b = estimate_power(spec, ParameterPoint(dense), 50000, RngStream(21, 0));
  EXPECT_LE(std::fabs(a.estimate - b.estimate), 4.0 * std::hypot(a.standard_error, b.standard_error));
}

TEST(EstimatePower, IndependentOfWorkerCount) {
  const std::size_t d = 12;
  const auto spec = make_calibrated_test(HigherCriticismFamily{}, d, 0.1,
                                         {CalibrationMethod::monte_carlo, 2000}, RngStream(3, 3));
  const auto theta = realize_alternative(AlternativeRule::sparse_spike(2, DimensionRule::constant(2.0)), d);
  const auto a = estimate_power(spec, theta, 3001, RngStream(4, 4), 1);
  const auto b = estimate_power(spec, theta, 3001, RngStream(4, 4), 4);
  EXPECT_EQ(a.rejections, b.rejections);
  EXPECT_THROW(estimate_power(spec, theta, 99, RngStream(4, 4)), Error);
}

TEST(EstimatePower, NonComparabilityOfLrAndMaxTests) {
  const std::size_t d = 1024;
  const auto lr = make_calibrated_test(kLr, d, 0.05, {CalibrationMethod::exact}, {});
  const auto mx = make_calibrated_test(kMax, d, 0.05, {CalibrationMethod::exact}, {});
  // Dense: ||theta||_2^2 = 3 sqrt(d) spread evenly, every coordinate tiny.
  const auto dense = realize_alternative(AlternativeRule::dense(std::sqrt(3.0), -0.25), d);
  // Spike: one coordinate of size 6, ||theta||_2^2 = 36 ~ 1.1 sqrt(d).
  const auto spike = realize_alternative(AlternativeRule::sparse_spike(1, DimensionRule::constant(6.0)), d);
  const RngStream rng(1024, 0);
  const auto lr_dense = estimate_power(lr, dense, 10000, rng.child(0));
  const auto mx_dense = estimate_power(mx, dense, 10000, rng.child(1));
  const auto lr_spike = estimate_power(lr, spike, 10000, rng.child(2));
  const auto mx_spike = estimate_power(mx, spike, 10000, rng.child(3));
  EXPECT_GT(lr_dense.estimate - mx_dense.estimate,
            10.0 * std::hypot(lr_dense.standard_error, mx_dense.standard_error));
  EXPECT_GT(mx_spike.estimate - lr_spike.estimate,
            10.0 * std::hypot(lr_spike.standard_error, mx_spike.standard_error));
}

TEST(LrPowerBeta, NullValueAndOneDimensionalClosedForm) {
  EXPECT_EQ(lr_power_beta({7, 0.05, 0.0}), 0.05);
  const double z = 1.959963984540054;
  EXPECT_NEAR(lr_power_beta({1, 0.05, 2.0}), phi(-z + 2.0) + phi(-z - 2.0), 1e-10);
}

TEST(LrPowerBeta, MatchesBoostAndIsMonotone) {
  for (std::size_t d : {2u, 30u, 500u, 4096u}) {
    double previous = 0.0;
    for (double r = 0.0; r <= 12.0; r += 0.75) {
      const double beta = lr_power_beta({d, 0.05, r});
      EXPECT_GE(beta, previous - 1e-15);
      previous = beta;
      if (r > 0.0) {
        const boost::math::non_central_chi_squared_distribution<double> dist(double(d), r * r);
        const double c = chi_square_upper_quantile(0.05, double(d));
        EXPECT_NEAR(beta, boost::math::cdf(boost::math::complement(dist, c)), 1e-10);
      }
    }
  }
  EXPECT_THROW(lr_power_beta({5, 0.0, 1.0}), Error);
  EXPECT_THROW(lr_power_beta({5, 0.05, -1.0}), Error);
}
