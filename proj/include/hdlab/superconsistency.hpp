#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdlab/hypothesis_tests.hpp"
#include "hdlab/model.hpp"
#include "hdlab/rng.hpp"

namespace hdlab {

/// 2 exp(-eps^2 (d - 1) / (2 r^2)), without the cap at one.
double concentration_bound_raw(std::size_t d, double r, double eps);
/// The same capped at 1, the form used in reports.
double concentration_bound(std::size_t d, double r, double eps);

/// Measured probability against an analytic upper bound.
struct BoundReport {
  double estimate = 0.0;
  std::uint64_t n = 0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double analytic_bound = 1.0;
  double slack = 0.0;
  bool pass = false;
};

/// pass = ci_upper <= analytic_bound + slack.
BoundReport make_bound_report(std::uint64_t hits, std::uint64_t n, double analytic_bound,
                              double slack = 0.0);

/// Size entering beta_{d,alpha}: the nominal alpha for exactly calibrated
/// tests, otherwise the null rejection frequency over n draws.
double effective_size(const TestSpec& test, std::uint64_t n, const RngStream& rng,
                      unsigned workers = 1);

/// Power estimates of `test` at outer_n uniform points of the radius-r
/// sphere, inner_n replications each. Point i is drawn from
/// rng.child(0).child(i); its replications from rng.child(1).child(i).
std::vector<double> sphere_power_profile(const TestSpec& test, double r, std::uint64_t outer_n,
                                         std::uint64_t inner_n, const RngStream& rng,
                                         unsigned workers = 1);

struct ExcessPowerQuery {
  TestSpec test;
  double r = 1.0;
  double epsilon = 0.1;
  std::uint64_t outer_n = 1000;
  std::uint64_t inner_n = 1000;
  /// Extra margin, in inner standard errors, a point must clear to count.
  double decision_margin = 0.0;
  /// Size alpha of `test` used for the LR benchmark.
  double size = 0.05;
};

struct RegionMeasure {
  double estimate = 0.0;
  std::uint64_t count = 0;
  std::uint64_t n = 0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double lr_beta = 0.0;
  /// beta + eps >= 1: the region is empty and nothing was simulated.
  bool analytically_empty = false;
};

/// Fraction of sphere points whose estimated power exceeds
/// beta_{d,size}(r) + eps + decision_margin * inner_se. The margin makes
/// this a downward-biased estimate of rho_{d,r}(F_d(eps, psi)).
/// Requires 3 / sqrt(inner_n) <= eps / 4 (invalid_input otherwise).
RegionMeasure excess_power_region_measure(const ExcessPowerQuery& query, const RngStream& rng,
                                          unsigned workers = 1);

struct WapEstimate {
  double estimate = 0.0;
  /// Standard deviation of the per-point estimates over sqrt(outer_n);
  /// covers both sphere and replication noise.
  double combined_standard_error = 0.0;
  std::uint64_t outer_n = 0;
  std::uint64_t inner_n = 0;
};

WapEstimate wap_average_power(const TestSpec& test, double r, std::uint64_t outer_n,
                              std::uint64_t inner_n, const RngStream& rng, unsigned workers = 1);

struct LipschitzReport {
  double power_1 = 0.0;
  double power_2 = 0.0;
  double delta = 0.0;
  double combined_standard_error = 0.0;
  double bound = 0.0;  // ||theta_1 - theta_2||_2 / 2
  bool pass = false;
};

/// pass iff |P(theta_1) - P(theta_2)| <= ||theta_1 - theta_2||_2 / 2 + 4 se.
/// The two powers are estimated on independent streams.
LipschitzReport lipschitz_power_check(const TestSpec& test, const ParameterPoint& theta_1,
                                      const ParameterPoint& theta_2, std::uint64_t inner_n,
                                      const RngStream& rng, unsigned workers = 1);
LipschitzReport lipschitz_power_check(const DecisionRule& rule, const ParameterPoint& theta_1,
                                      const ParameterPoint& theta_2, std::uint64_t inner_n,
                                      const RngStream& rng, unsigned workers = 1);

struct MonotonicityReport {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> standard_errors;
  bool nondecreasing = false;
  bool at_least_one = false;
};

/// g(a) = E cosh(a gamma_1), gamma uniform on the radius-r sphere: the
/// symmetrized spherical Bayes factor integral, estimated on n common sphere
/// draws for every a on the (increasing, nonnegative) grid.
MonotonicityReport spherical_bayes_statistic_monotonicity(std::size_t d, double r,
                                                          std::span<const double> a_grid,
                                                          std::uint64_t n, const RngStream& rng);

struct Theorem3Config {
  TestFamily family;
  double alpha = 0.05;
  Calibration calibration;
  std::vector<std::size_t> d_grid;
  DimensionRule radius;     // r_d
  DimensionRule threshold;  // D_d = {||theta||_p >= s_d} within B_2^d(r_d)
  std::uint64_t volume_n = 100000;
  std::uint64_t size_n = 100000;  // for Monte-Carlo calibrated tests
};

struct Theorem3Row {
  std::size_t d = 0;
  double r = 0.0;
  double s = 0.0;
  double size = 0.0;
  double lr_beta = 0.0;
  /// inf over D_d of the p-norm consistency criterion, >= s^p / sqrt(d).
  double criterion_lower_bound = 0.0;
  bool region_empty = false;
  BoundReport report;
};

struct Theorem3Report {
  /// max over the grid of beta_{d,alpha_d}(r_d), standing in for the limsup.
  double beta_max = 0.0;
  /// (1 - beta_max) / 2
  double epsilon = 0.0;
  std::vector<Theorem3Row> rows;
};

/// Raises configuration_invalid unless d^{-1/2} s_d^p grows on the grid, or
/// the region is empty at every grid point. Also checks the family and grid.
void check_theorem3_premise(const Theorem3Config& config);

/// Measures vol(D_d)/vol(B_2^d(r_d)) on the grid and compares it with
/// 2 exp(-eps^2 (d-1) / (2 r_d^2)). The family must be a finite-p p-norm test;
/// a region whose consistency criterion does not grow on the grid is not
/// inside the test's consistency set and raises configuration_invalid.
Theorem3Report verify_theorem3(const Theorem3Config& config, const RngStream& rng,
                               unsigned workers = 1);

}  // namespace hdlab
