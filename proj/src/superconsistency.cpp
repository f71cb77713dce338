#include "hdlab/superconsistency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdlab/error.hpp"
#include "hdlab/geometry.hpp"
#include "hdlab/parallel.hpp"
#include "hdlab/stats.hpp"

namespace hdlab {

double concentration_bound_raw(std::size_t d, double r, double eps) {
  require(d >= 1, "concentration bound requires d >= 1");
  require(r > 0.0, "concentration bound requires r > 0");
  require(eps > 0.0, "concentration bound requires eps > 0");
  return 2.0 * std::exp(-eps * eps * (static_cast<double>(d) - 1.0) / (2.0 * r * r));
}

double concentration_bound(std::size_t d, double r, double eps) {
  return std::min(1.0, concentration_bound_raw(d, r, eps));
}

BoundReport make_bound_report(std::uint64_t hits, std::uint64_t n, double analytic_bound,
                              double slack) {
  BoundReport out;
  out.n = n;
  out.estimate = n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
  const auto ci = wilson_interval(hits, n);
  out.ci_lower = ci.lower;
  out.ci_upper = ci.upper;
  out.analytic_bound = analytic_bound;
  out.slack = slack;
  out.pass = out.ci_upper <= analytic_bound + slack;
  return out;
}

double effective_size(const TestSpec& test, std::uint64_t n, const RngStream& rng,
                      unsigned workers) {
  if (test.size_is_exact()) return test.alpha();
  return estimate_power(test, ParameterPoint::zero(test.dim()), n, rng, workers).estimate;
}

std::vector<double> sphere_power_profile(const TestSpec& test, double r, std::uint64_t outer_n,
                                         std::uint64_t inner_n, const RngStream& rng,
                                         unsigned workers) {
  require(r > 0.0, "sphere radius must be > 0");
  require(outer_n >= 1 && inner_n >= 1, "sphere power profile needs outer_n, inner_n >= 1");
  const std::size_t d = test.dim();
  const RngStream points = rng.child(0);
  const RngStream noise = rng.child(1);
  struct Scratch {
    std::vector<double> theta, y;
    TestEvaluator evaluator;
  };
  return parallel_map<double>(
      outer_n, workers,
      [&] { return Scratch{std::vector<double>(d), std::vector<double>(d), TestEvaluator(test)}; },
      [&](std::uint64_t i, Scratch& s) {
        RngCursor cursor(points.child(i));
        sample_uniform_sphere(d, r, cursor, s.theta);
        const RngStream replications = noise.child(i);
        std::uint64_t hits = 0;
        for (std::uint64_t j = 0; j < inner_n; ++j) {
          draw_observation(s.theta, replications.child(j), s.y);
          if (s.evaluator.rejects(s.y)) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(inner_n);
      });
}

RegionMeasure excess_power_region_measure(const ExcessPowerQuery& q, const RngStream& rng,
                                          unsigned workers) {
  require(q.epsilon > 0.0 && q.epsilon < 1.0, "excess-power margin eps must lie in (0,1)");
  require(q.r > 0.0, "sphere radius must be > 0");
  require(q.outer_n >= 1, "outer_n must be >= 1");
  require(q.decision_margin >= 0.0, "decision_margin must be >= 0");
  require(q.size >= 0.0 && q.size <= 1.0, "test size must lie in [0,1]");
  require(3.0 / std::sqrt(static_cast<double>(q.inner_n)) <= q.epsilon / 4.0,
          "inner_n=" + std::to_string(q.inner_n) +
              " too small: need 3/sqrt(inner_n) <= eps/4");

  RegionMeasure out;
  out.n = q.outer_n;
  // Sizes 0 and 1 leave no room for excess power.
  if (q.size <= 0.0 || q.size >= 1.0) {
    out.lr_beta = q.size;
    out.analytically_empty = true;
  } else {
    out.lr_beta = lr_power_beta({q.test.dim(), q.size, q.r});
    out.analytically_empty = out.lr_beta + q.epsilon >= 1.0;
  }
  if (!out.analytically_empty) {
    const auto powers = sphere_power_profile(q.test, q.r, q.outer_n, q.inner_n, rng, workers);
    const double inner = static_cast<double>(q.inner_n);
    for (double p : powers) {
      const double se = std::sqrt(p * (1.0 - p) / inner);
      if (p > out.lr_beta + q.epsilon + q.decision_margin * se) ++out.count;
    }
  }
  out.estimate = static_cast<double>(out.count) / static_cast<double>(out.n);
  const auto ci = wilson_interval(out.count, out.n);
  out.ci_lower = ci.lower;
  out.ci_upper = ci.upper;
  return out;
}

WapEstimate wap_average_power(const TestSpec& test, double r, std::uint64_t outer_n,
                              std::uint64_t inner_n, const RngStream& rng, unsigned workers) {
  require(outer_n >= 2, "wap_average_power needs outer_n >= 2");
  const auto powers = sphere_power_profile(test, r, outer_n, inner_n, rng, workers);
  const double n = static_cast<double>(outer_n);
  double mean = 0.0;
  for (double p : powers) mean += p;
  mean /= n;
  double ss = 0.0;
  for (double p : powers) ss += (p - mean) * (p - mean);
  WapEstimate out;
  out.estimate = mean;
  out.combined_standard_error = std::sqrt(ss / (n - 1.0) / n);
  out.outer_n = outer_n;
  out.inner_n = inner_n;
  return out;
}

namespace {

template <class Estimate>
LipschitzReport lipschitz_from(const ParameterPoint& theta_1, const ParameterPoint& theta_2,
                               Estimate&& estimate) {
  require(theta_1.dim() == theta_2.dim(), "Lipschitz check needs equal dimensions");
  double dist2 = 0.0;
  for (std::size_t i = 0; i < theta_1.dim(); ++i) {
    const double diff = theta_1[i] - theta_2[i];
    dist2 += diff * diff;
  }
  const PowerEstimate first = estimate(theta_1, 0);
  const PowerEstimate second = estimate(theta_2, 1);
  LipschitzReport out;
  out.power_1 = first.estimate;
  out.power_2 = second.estimate;
  out.delta = std::fabs(first.estimate - second.estimate);
  out.combined_standard_error = std::hypot(first.standard_error, second.standard_error);
  out.bound = 0.5 * std::sqrt(dist2);
  out.pass = out.delta <= out.bound + 4.0 * out.combined_standard_error;
  return out;
}

}  // namespace

LipschitzReport lipschitz_power_check(const TestSpec& test, const ParameterPoint& theta_1,
                                      const ParameterPoint& theta_2, std::uint64_t inner_n,
                                      const RngStream& rng, unsigned workers) {
  return lipschitz_from(theta_1, theta_2, [&](const ParameterPoint& theta, std::uint64_t k) {
    return estimate_power(test, theta, inner_n, rng.child(k), workers);
  });
}

LipschitzReport lipschitz_power_check(const DecisionRule& rule, const ParameterPoint& theta_1,
                                      const ParameterPoint& theta_2, std::uint64_t inner_n,
                                      const RngStream& rng, unsigned workers) {
  return lipschitz_from(theta_1, theta_2, [&](const ParameterPoint& theta, std::uint64_t k) {
    return estimate_power(rule, theta, inner_n, rng.child(k), workers);
  });
}

MonotonicityReport spherical_bayes_statistic_monotonicity(std::size_t d, double r,
                                                          std::span<const double> a_grid,
                                                          std::uint64_t n, const RngStream& rng) {
  require(d >= 1 && r > 0.0, "spherical Bayes statistic needs d >= 1 and r > 0");
  require(n >= 2, "spherical Bayes statistic needs n >= 2");
  for (std::size_t k = 0; k < a_grid.size(); ++k) {
    require(a_grid[k] >= 0.0, "grid values must be >= 0");
    if (k > 0) require(a_grid[k] > a_grid[k - 1], "grid must be increasing");
  }

  std::vector<double> first_coordinate(n);
  std::vector<double> gamma(d);
  for (std::uint64_t i = 0; i < n; ++i) {
    RngCursor cursor(rng.child(i));
    sample_uniform_sphere(d, r, cursor, gamma);
    first_coordinate[i] = gamma[0];
  }

  MonotonicityReport out;
  out.grid.assign(a_grid.begin(), a_grid.end());
  const double nn = static_cast<double>(n);
  for (double a : a_grid) {
    double sum = 0.0;
    for (double g : first_coordinate) sum += std::cosh(a * g);
    const double mean = sum / nn;
    double ss = 0.0;
    for (double g : first_coordinate) {
      const double dev = std::cosh(a * g) - mean;
      ss += dev * dev;
    }
    out.values.push_back(mean);
    out.standard_errors.push_back(std::sqrt(ss / (nn - 1.0) / nn));
  }
  out.nondecreasing = std::is_sorted(out.values.begin(), out.values.end());
  out.at_least_one = std::all_of(out.values.begin(), out.values.end(),
                                 [](double v) { return v >= 1.0; });
  return out;
}

namespace {

std::vector<Theorem3Row> theorem3_rows(const Theorem3Config& config) {
  const auto* pn = std::get_if<PNormFamily>(&config.family);
  require(pn != nullptr && std::isfinite(pn->p),
          "verify_theorem3 needs a p-norm test family with finite p");
  require(config.d_grid.size() >= 2, "verify_theorem3 needs at least two grid points");
  for (std::size_t i = 1; i < config.d_grid.size(); ++i) {
    require(config.d_grid[i] > config.d_grid[i - 1], "d_grid must be strictly increasing");
  }
  const double p = pn->p;
  std::vector<Theorem3Row> rows;
  for (std::size_t d : config.d_grid) {
    Theorem3Row row;
    row.d = d;
    row.r = config.radius(d);
    row.s = config.threshold(d);
    require(row.r > 0.0, "radius rule must be positive at d=" + std::to_string(d));
    require(row.s >= 0.0, "threshold rule must be >= 0 at d=" + std::to_string(d));
    row.region_empty = row.s > max_pnorm_on_ball(d, p, row.r);
    row.criterion_lower_bound =
        row.region_empty ? kInf : std::pow(row.s, p) / std::sqrt(static_cast<double>(d));
    rows.push_back(row);
  }
  const bool all_empty =
      std::all_of(rows.begin(), rows.end(), [](const Theorem3Row& r) { return r.region_empty; });
  std::vector<double> criterion;
  for (const auto& row : rows) criterion.push_back(row.criterion_lower_bound);
  if (!all_empty && !grows_on_grid(criterion)) {
    fail(ErrorKind::configuration_invalid,
         "region D_d is not inside the consistency set of " + describe(config.family) +
             ": d^{-1/2} s_d^p does not grow on the grid");
  }
  return rows;
}

}  // namespace

void check_theorem3_premise(const Theorem3Config& config) { theorem3_rows(config); }

Theorem3Report verify_theorem3(const Theorem3Config& config, const RngStream& rng,
                               unsigned workers) {
  const double p = std::get<PNormFamily>(config.family).p;
  Theorem3Report report;
  report.rows = theorem3_rows(config);

  for (auto& row : report.rows) {
    const TestSpec test = make_calibrated_test(config.family, row.d, config.alpha,
                                               config.calibration, rng.child(0).child(row.d),
                                               workers);
    row.size = effective_size(test, config.size_n, rng.child(1).child(row.d), workers);
    row.lr_beta = (row.size > 0.0 && row.size < 1.0)
                      ? lr_power_beta({row.d, row.size, row.r})
                      : row.size;
    report.beta_max = std::max(report.beta_max, row.lr_beta);
  }
  report.epsilon = 0.5 * (1.0 - report.beta_max);
  require(report.epsilon > 0.0, "LR power reaches one on the grid; eps would be zero");

  for (auto& row : report.rows) {
    std::uint64_t hits = 0;
    if (!row.region_empty) {
      hits = pnorm_threshold_fraction(row.d, p, row.r, row.s, config.volume_n,
                                      rng.child(2).child(row.d), workers)
                 .hits;
    }
    row.report = make_bound_report(hits, config.volume_n,
                                   concentration_bound(row.d, row.r, report.epsilon));
  }
  return report;
}

}  // namespace hdlab
