#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hdlab/model.hpp"
#include "hdlab/rng.hpp"
#include "hdlab/stats.hpp"

namespace hdlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class TestSpec;

/// Rejects when ||y||_p >= kappa. p = +inf is the max test; p = 2 is the LR test.
struct PNormFamily {
  double p = 2.0;
};

/// Normalized empirical-process statistic over the smallest `fraction * d`
/// two-sided p-values, floored at zero.
struct HigherCriticismFamily {
  double fraction = 0.5;
};

/// Rejects when either child rejects.
struct CombinedFamily {
  std::shared_ptr<const TestSpec> primary;
  std::shared_ptr<const TestSpec> enhancement;
};

using TestFamily = std::variant<PNormFamily, HigherCriticismFamily, CombinedFamily>;

enum class CalibrationMethod { exact, monte_carlo, clt_approx, fixed };

struct Calibration {
  CalibrationMethod method = CalibrationMethod::exact;
  std::uint64_t n = 0;  // null replications for monte_carlo
};

/// A concrete indicator test: family, dimension, critical value and nominal
/// size. The rejection region {T(y) >= kappa} is closed.
class TestSpec {
 public:
  TestSpec(TestFamily family, std::size_t d, double critical_value, double alpha,
           Calibration calibration = {CalibrationMethod::fixed, 0});

  const TestFamily& family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return d_; }
  double critical_value() const noexcept { return kappa_; }
  double alpha() const noexcept { return alpha_; }
  const Calibration& calibration() const noexcept { return calibration_; }

  bool is_lr() const noexcept;
  /// True when the nominal size is exact (closed-form calibration).
  bool size_is_exact() const noexcept;

 private:
  TestFamily family_;
  std::size_t d_;
  double kappa_;
  double alpha_;
  Calibration calibration_;
};

std::string describe(const TestFamily& family);
std::string describe(const TestSpec& spec);

/// (sum |x_i|^p)^{1/p}, or max |x_i| for p = inf. Falls back to factoring out
/// max |x_i| when the direct power sum over- or underflows. p <= 0 is
/// rejected with invalid_input.
double p_norm(std::span<const double> x, double p);

/// max over i <= fraction * d of sqrt(d) (i/d - p_(i)) / sqrt(p_(i)(1 - p_(i))),
/// p_(i) the sorted two-sided p-values 2(1 - Phi(|y_i|)); floored at 0.
/// Requires d >= 2.
double higher_criticism_statistic(std::span<const double> y, double fraction = 0.5);

/// Statistic of a non-combined family.
double test_statistic(const TestFamily& family, std::span<const double> y);

/// Reusable evaluator holding scratch storage; not thread-safe, make one per
/// worker.
class TestEvaluator {
 public:
  explicit TestEvaluator(const TestSpec& spec);
  bool rejects(std::span<const double> y);

 private:
  const TestSpec* spec_;
  std::vector<double> scratch_;
  std::vector<TestEvaluator> children_;
};

/// 1 iff the statistic reaches the critical value (OR over children for a
/// combined test). Dimension mismatch -> invalid_input.
int evaluate(const TestSpec& spec, std::span<const double> y);

struct CalibrationResult {
  double critical_value = 0.0;
  /// Standard error of the critical value (0 for exact; order-statistic
  /// based for monte_carlo; Cornish-Fisher correction size for clt_approx).
  double critical_value_error = 0.0;
  /// Binomial standard error of the achieved size for monte_carlo.
  double size_error = 0.0;
  Calibration calibration;
};

/// Critical value with null rejection probability alpha.
///  exact:       p = inf: Phi^{-1}((1 + (1-alpha)^{1/d}) / 2); p = 2: chi-square root.
///  monte_carlo: type-7 empirical (1-alpha)-quantile of n null statistics.
///  clt_approx:  ||eps||_p^p ~ Normal(d mu_p, d sigma_p^2).
/// Unsupported family/method pairs -> invalid_input; n * alpha < 20 ->
/// calibration_insufficient.
CalibrationResult calibrate_critical_value(const TestFamily& family, std::size_t d, double alpha,
                                           Calibration calibration, const RngStream& rng,
                                           unsigned workers = 1);

/// Calibrates and wraps the result in a TestSpec.
TestSpec make_calibrated_test(const TestFamily& family, std::size_t d, double alpha,
                              Calibration calibration, const RngStream& rng,
                              unsigned workers = 1);

/// OR combination. Nominal size is the union bound min(1, alpha_1 + alpha_2).
TestSpec combine(const TestSpec& primary, const TestSpec& enhancement);

struct PowerEstimate {
  double estimate = 0.0;
  std::uint64_t n = 0;
  std::uint64_t rejections = 0;
  double standard_error = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 1.0;
  RngStream rng;
};

PowerEstimate make_power_estimate(std::uint64_t rejections, std::uint64_t n, RngStream rng);

using DecisionRule = std::function<bool(std::span<const double>)>;

/// Rejection frequency over n draws y = theta + z. Replication j draws its
/// noise from rng.child(j), so the result does not depend on `workers`, and
/// two calls with the same rng share their noise draws. Requires n >= 100.
PowerEstimate estimate_power(const TestSpec& spec, const ParameterPoint& theta, std::uint64_t n,
                             const RngStream& rng, unsigned workers = 1);

/// Same, for an arbitrary indicator test (must be thread-safe when
/// workers > 1).
PowerEstimate estimate_power(const DecisionRule& rule, const ParameterPoint& theta,
                             std::uint64_t n, const RngStream& rng, unsigned workers = 1);

struct LrPowerQuery {
  std::size_t d = 1;
  double alpha = 0.05;
  double r = 0.0;
};

/// Power of the size-alpha LR test against any theta with ||theta||_2 = r:
/// P(chi2_d(r^2) > c_{d,alpha}).
double lr_power_beta(const LrPowerQuery& query);

}  // namespace hdlab
