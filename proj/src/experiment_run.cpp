#include <cmath>
#include <map>

#include "hdlab/error.hpp"
#include "hdlab/experiment.hpp"
#include "hdlab/geometry.hpp"
#include "hdlab/stats.hpp"
#include "hdlab/superconsistency.hpp"

namespace hdlab {
namespace {

// Stream branches of an experiment. Branch 0 carries the draws that rows
// share (common random numbers); the others are keyed by grid position.
constexpr std::uint64_t kShared = 0;
constexpr std::uint64_t kCalibration = 1;
constexpr std::uint64_t kSize = 2;
constexpr std::uint64_t kPanel = 3;

const std::vector<std::string> kPrefix{"config_hash", "seed", "experiment", "kind", "row", "status"};
const std::vector<std::string> kSuffix{"pass", "margin", "message"};

std::uint64_t name_stream(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

using Cells = std::map<std::string, std::string>;

std::string num(double x) { return format_number(x); }
std::string num(std::uint64_t x) { return std::to_string(x); }

class TableBuilder {
 public:
  TableBuilder(const ExperimentConfig& e, std::vector<std::string> columns)
      : hash_(hash_hex(config_hash(e))), seed_(std::to_string(e.seed)), name_(e.name),
        kind_(kind_name(e.params)), columns_(std::move(columns)) {
    table_.header = kPrefix;
    table_.header.insert(table_.header.end(), columns_.begin(), columns_.end());
    table_.header.insert(table_.header.end(), kSuffix.begin(), kSuffix.end());
  }

  void add(Cells cells, bool pass, std::optional<double> margin, const std::string& status = "ok",
           const std::string& message = "") {
    std::vector<std::string> row{hash_, seed_, name_, kind_, std::to_string(table_.rows.size()), status};
    for (const auto& c : columns_) {
      const auto it = cells.find(c);
      row.push_back(it == cells.end() ? "" : it->second);
      if (it != cells.end()) cells.erase(it);
    }
    if (!cells.empty()) fail(ErrorKind::numeric_failure, "internal: unknown column " + cells.begin()->first);
    row.push_back(format_bool(pass));
    row.push_back(margin ? num(*margin) : "");
    row.push_back(message);
    table_.rows.push_back(std::move(row));
  }

  void add_error(Cells cells, const Error& e) {
    add(std::move(cells), false, std::nullopt, std::string(to_string(e.kind())), e.what());
  }

  Table take() { return std::move(table_); }

 private:
  std::string hash_, seed_, name_, kind_;
  std::vector<std::string> columns_;
  Table table_;
};

std::optional<double> min_margin(std::optional<double> a, std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

/// Trend bookkeeping along one track of a sweep.
struct TrendCheck {
  Trend trend = Trend::none;
  std::optional<double> previous;

  // Returns the signed slack of the step (>= 0 passes), or nullopt when
  // there is nothing to compare.
  std::optional<double> step(double value) {
    std::optional<double> slack;
    if (previous && trend != Trend::none) {
      slack = trend == Trend::nondecreasing ? value - *previous : *previous - value;
    }
    previous = value;
    return slack;
  }
};

bool needs_estimated_size(const TestSpec& test) { return !test.size_is_exact(); }

double size_for_beta(const TestSpec& test, std::uint64_t size_n, const RngStream& rng,
                     unsigned workers) {
  return needs_estimated_size(test) ? effective_size(test, size_n, rng, workers) : test.alpha();
}

double beta_at(std::size_t d, double size, double r) {
  if (size <= 0.0 || size >= 1.0) return size;
  return lr_power_beta({d, size, r});
}

bool is_exact_lr(const TestSpec& test) { return test.is_lr() && test.size_is_exact(); }

// ---- calibrate --------------------------------------------------------------

Table run(const ExperimentConfig& e, const CalibrateConfig& c, unsigned workers) {
  const RngStream base(e.seed, name_stream(e.name));
  TableBuilder out(e, {"test", "d", "alpha", "method", "n_cal", "critical_value",
                       "critical_value_se", "size_se", "reference", "reference_tolerance",
                       "size_n", "null_rejections", "size_estimate", "band_lower", "band_upper"});
  for (std::size_t ti = 0; ti < c.tests.size(); ++ti) {
    const TestConfig& tc = c.tests[ti];
    for (std::size_t d : c.d) {
      for (std::size_t ai = 0; ai < c.alpha.size(); ++ai) {
        const double alpha = tc.alpha.value_or(c.alpha[ai]);
        Cells cells{{"test", label(tc)}, {"d", num(std::uint64_t{d})}, {"alpha", num(alpha)},
                    {"method", std::string(tc.kind == TestConfig::Kind::combined ? "combined" : "")}};
        try {
          const RngStream cal = base.child(kCalibration).child(ti).child(d).child(ai);
          bool pass = true;
          std::optional<double> margin;
          std::optional<TestSpec> test;
          if (tc.kind == TestConfig::Kind::combined) {
            test = build_test(tc, d, alpha, cal, workers);
            cells["critical_value"] = num(test->critical_value());
          } else {
            const TestFamily family = tc.kind == TestConfig::Kind::p_norm
                                          ? TestFamily{PNormFamily{tc.p}}
                                          : TestFamily{HigherCriticismFamily{tc.fraction}};
            test = build_test(tc, d, alpha, cal, workers);
            cells["critical_value"] = num(test->critical_value());
            cells["n_cal"] = num(tc.calibration.n);
            const char* methods[] = {"exact", "monte_carlo", "clt_approx", "fixed"};
            cells["method"] = methods[static_cast<int>(tc.calibration.method)];
            double kappa_se = 0.0;
            if (tc.calibration.method != CalibrationMethod::fixed) {
              const auto result = calibrate_critical_value(family, d, alpha, tc.calibration, cal, workers);
              kappa_se = result.critical_value_error;
              cells["critical_value_se"] = num(result.critical_value_error);
              cells["size_se"] = num(result.size_error);
            }
            const bool has_reference =
                tc.kind == TestConfig::Kind::p_norm && (tc.p == 2.0 || std::isinf(tc.p));
            if (has_reference && tc.calibration.method != CalibrationMethod::fixed) {
              const double ref =
                  calibrate_critical_value(family, d, alpha, {CalibrationMethod::exact, 0}, cal).critical_value;
              const double tol = tc.calibration.method == CalibrationMethod::exact ? 1e-9 : 4.0 * kappa_se;
              cells["reference"] = num(ref);
              cells["reference_tolerance"] = num(tol);
              const double slack = tol - std::fabs(test->critical_value() - ref);
              pass = pass && slack >= 0.0;
              margin = min_margin(margin, slack);
            }
          }
          if (c.size_n > 0) {
            const auto est = estimate_power(*test, ParameterPoint::zero(d), c.size_n,
                                            base.child(kSize).child(ti).child(d).child(ai), workers);
            const auto band = binomial_acceptance_band(test->alpha(), c.size_n, c.band_level);
            cells["size_n"] = num(c.size_n);
            cells["null_rejections"] = num(est.rejections);
            cells["size_estimate"] = num(est.estimate);
            cells["band_lower"] = num(band.lower);
            cells["band_upper"] = num(band.upper);
            const double slack = std::min(est.estimate - band.lower, band.upper - est.estimate);
            pass = pass && slack >= 0.0;
            margin = min_margin(margin, slack);
          }
          out.add(std::move(cells), pass, margin);
        } catch (const Error& err) {
          out.add_error(std::move(cells), err);
        }
      }
    }
  }
  return out.take();
}

// ---- power_curve ------------------------------------------------------------

Table run(const ExperimentConfig& e, const PowerCurveConfig& c, unsigned workers) {
  const RngStream base(e.seed, name_stream(e.name));
  TableBuilder out(e, {"test", "d", "alpha", "alternative", "theta_norm", "n", "rejections",
                       "power", "standard_error", "ci_lower", "ci_upper", "size", "lr_beta",
                       "oracle_se", "z"});
  const std::size_t tracks = c.alternative ? 1 : c.radius.size();
  std::map<std::pair<std::size_t, std::size_t>, TrendCheck> trends;
  for (std::size_t d : c.d) {
    for (std::size_t ai = 0; ai < c.alpha.size(); ++ai) {
      std::optional<TestSpec> test;
      double size = 0.0;
      std::optional<Error> setup_error;
      try {
        test = build_test(c.test, d, c.alpha[ai], base.child(kCalibration).child(d).child(ai), workers);
        size = size_for_beta(*test, c.size_n, base.child(kSize).child(d).child(ai), workers);
      } catch (const Error& err) {
        setup_error = err;
      }
      for (std::size_t k = 0; k < tracks; ++k) {
        Cells cells{{"test", label(c.test)}, {"d", num(std::uint64_t{d})}, {"alpha", num(c.alpha[ai])}};
        try {
          if (setup_error) throw *setup_error;
          ParameterPoint theta = ParameterPoint::zero(d);
          if (c.alternative) {
            theta = realize_alternative(c.alternative->rule(), d);
            cells["alternative"] = label(*c.alternative);
          } else {
            std::vector<double> v(d, 0.0);
            v[0] = c.radius[k];
            theta = ParameterPoint(v);
            cells["alternative"] = "radius*e1";
          }
          const double r = theta.norm();
          const auto est = estimate_power(*test, theta, c.n, base.child(kShared), workers);
          const double beta = beta_at(d, size, r);
          const double oracle_se = std::sqrt(beta * (1.0 - beta) / static_cast<double>(c.n));
          cells["theta_norm"] = num(r);
          cells["n"] = num(c.n);
          cells["rejections"] = num(est.rejections);
          cells["power"] = num(est.estimate);
          cells["standard_error"] = num(est.standard_error);
          cells["ci_lower"] = num(est.ci_lower);
          cells["ci_upper"] = num(est.ci_upper);
          cells["size"] = num(size);
          cells["lr_beta"] = num(beta);
          cells["oracle_se"] = num(oracle_se);
          if (oracle_se > 0.0) cells["z"] = num((est.estimate - beta) / oracle_se);

          bool pass = true;
          std::optional<double> margin;
          if (is_exact_lr(*test)) {
            // Four oracle standard errors, plus one replication of slack when beta is 0 or 1.
            const double tol = 4.0 * oracle_se + (oracle_se > 0.0 ? 0.0 : 1.0 / static_cast<double>(c.n));
            const double slack = tol - std::fabs(est.estimate - beta);
            pass = slack >= 0.0;
            margin = slack;
          }
          auto& trend = trends[{ai, k}];
          trend.trend = c.trend;
          if (const auto slack = trend.step(est.estimate)) {
            pass = pass && *slack >= 0.0;
            margin = min_margin(margin, *slack);
          }
          out.add(std::move(cells), pass, margin);
        } catch (const Error& err) {
          out.add_error(std::move(cells), err);
        }
      }
    }
  }
  return out.take();
}

// ---- volume_sweep -----------------------------------------------------------

Table run(const ExperimentConfig& e, const VolumeSweepConfig& c, unsigned workers) {
  const RngStream base(e.seed, name_stream(e.name));
  TableBuilder out(e, {"d", "p", "t", "u_d", "u_d_lower_bound", "n", "hits", "value",
                       "standard_error", "ci_lower", "ci_upper"});
  TrendCheck trend{c.trend, std::nullopt};
  std::optional<double> first;
  for (std::size_t i = 0; i < c.d.size(); ++i) {
    const std::size_t d = c.d[i];
    Cells cells{{"d", num(std::uint64_t{d})}, {"p", num(c.p)}};
    try {
      double t = 0.0;
      if (std::isfinite(c.p)) {
        const auto u = scaling_factor_u(d, c.p);
        cells["u_d"] = num(u.value);
        if (u.lower_bound) cells["u_d_lower_bound"] = num(*u.lower_bound);
        t = c.t.value_or(u.value);
      } else {
        t = c.t.value();
      }
      const auto est = intersection_volume_ratio(d, c.p, t, c.n, base.child(kShared), workers);
      cells["t"] = num(t);
      cells["n"] = num(c.n);
      cells["hits"] = num(est.hits);
      cells["value"] = num(est.value);
      cells["standard_error"] = num(est.standard_error);
      cells["ci_lower"] = num(est.ci_lower);
      cells["ci_upper"] = num(est.ci_upper);
      bool pass = true;
      std::optional<double> margin;
      if (const auto slack = trend.step(est.value)) {
        pass = *slack >= 0.0;
        margin = *slack;
      }
      if (!first) first = est.value;
      if (c.final_exceeds_first && i + 1 == c.d.size()) {
        const double slack = est.ci_lower - *first;
        pass = pass && slack > 0.0;
        margin = min_margin(margin, slack);
      }
      out.add(std::move(cells), pass, margin);
    } catch (const Error& err) {
      out.add_error(std::move(cells), err);
    }
  }
  return out.take();
}

// ---- verify_theorem2 --------------------------------------------------------

Table run(const ExperimentConfig& e, const Theorem2Config& c, unsigned workers) {
  const RngStream base(e.seed, name_stream(e.name));
  TableBuilder out(e, {"d", "p", "r", "s", "max_pnorm", "region_empty", "n", "hits", "value",
                       "ci_lower", "ci_upper", "criterion_lower_bound", "size", "lr_beta",
                       "epsilon", "bound"});
  TrendCheck trend{c.trend, std::nullopt};

  std::optional<Theorem3Report> report;
  std::optional<Error> report_error;
  if (c.test) {
    Theorem3Config t3;
    t3.family = PNormFamily{c.test->p};
    t3.alpha = c.test->alpha.value_or(c.alpha);
    t3.calibration = c.test->calibration;
    t3.d_grid = c.d;
    t3.radius = c.radius;
    t3.threshold = c.threshold;
    t3.volume_n = c.n;
    t3.size_n = c.size_n;
    try {
      report = verify_theorem3(t3, base.child(kShared), workers);
    } catch (const Error& err) {
      report_error = err;
    }
  }

  for (std::size_t i = 0; i < c.d.size(); ++i) {
    const std::size_t d = c.d[i];
    const double r = c.radius(d);
    const double s = c.threshold(d);
    const double max_norm = max_pnorm_on_ball(d, c.p, r);
    Cells cells{{"d", num(std::uint64_t{d})}, {"p", num(c.p)}, {"r", num(r)}, {"s", num(s)},
                {"max_pnorm", num(max_norm)}, {"region_empty", format_bool(s > max_norm)}};
    try {
      if (report_error) throw *report_error;
      std::uint64_t hits = 0;
      double value = 0.0, lo = 0.0, hi = 0.0;
      bool pass = true;
      std::optional<double> margin;
      if (report) {
        const auto& row = report->rows.at(i);
        hits = static_cast<std::uint64_t>(std::llround(row.report.estimate * static_cast<double>(row.report.n)));
        value = row.report.estimate;
        lo = row.report.ci_lower;
        hi = row.report.ci_upper;
        cells["criterion_lower_bound"] = num(row.criterion_lower_bound);
        cells["size"] = num(row.size);
        cells["lr_beta"] = num(row.lr_beta);
        cells["epsilon"] = num(report->epsilon);
        cells["bound"] = num(row.report.analytic_bound);
        pass = row.report.pass;
        margin = row.report.analytic_bound + row.report.slack - row.report.ci_upper;
      } else {
        const auto est = pnorm_threshold_fraction(d, c.p, r, s, c.n, base.child(kShared), workers);
        hits = est.hits;
        value = est.value;
        lo = est.ci_lower;
        hi = est.ci_upper;
      }
      cells["n"] = num(c.n);
      cells["hits"] = num(hits);
      cells["value"] = num(value);
      cells["ci_lower"] = num(lo);
      cells["ci_upper"] = num(hi);
      if (const auto slack = trend.step(value)) {
        pass = pass && *slack >= 0.0;
        margin = min_margin(margin, *slack);
      }
      if (c.final_max && i + 1 == c.d.size()) {
        const double slack = *c.final_max - value;
        pass = pass && slack >= 0.0;
        margin = min_margin(margin, slack);
      }
      out.add(std::move(cells), pass, margin);
    } catch (const Error& err) {
      out.add_error(std::move(cells), err);
    }
  }
  return out.take();
}

// ---- verify_prop4 -----------------------------------------------------------

Table run(const ExperimentConfig& e, const Prop4Config& c, unsigned workers) {
  const RngStream base(e.seed, name_stream(e.name));
  TableBuilder out(e, {"test", "d", "r", "alpha", "size", "lr_beta", "epsilon", "outer_n",
                       "inner_n", "decision_margin", "analytically_empty", "count", "estimate",
                       "ci_lower", "ci_upper", "bound"});
  for (std::size_t ti = 0; ti < c.tests.size(); ++ti) {
    for (std::size_t d : c.d) {
      const double r = c.radius(d);
      Cells cells{{"test", label(c.tests[ti])}, {"d", num(std::uint64_t{d})}, {"r", num(r)},
                  {"alpha", num(c.alpha)}, {"epsilon", num(c.epsilon)}, {"outer_n", num(c.outer_n)},
                  {"inner_n", num(c.inner_n)}, {"decision_margin", num(c.decision_margin)}};
      try {
        const TestSpec test =
            build_test(c.tests[ti], d, c.alpha, base.child(kCalibration).child(ti).child(d), workers);
        const double size = size_for_beta(test, c.size_n, base.child(kSize).child(ti).child(d), workers);
        const ExcessPowerQuery q{test, r, c.epsilon, c.outer_n, c.inner_n, c.decision_margin, size};
        const auto m = excess_power_region_measure(q, base.child(kShared).child(d), workers);
        const double bound = concentration_bound(d, r, c.epsilon);
        cells["size"] = num(size);
        cells["lr_beta"] = num(m.lr_beta);
        cells["analytically_empty"] = format_bool(m.analytically_empty);
        cells["count"] = num(m.count);
        cells["estimate"] = num(m.estimate);
        cells["ci_lower"] = num(m.ci_lower);
        cells["ci_upper"] = num(m.ci_upper);
        cells["bound"] = num(bound);
        // A provably empty region has measure exactly zero; no interval is needed.
        if (m.analytically_empty) {
          out.add(std::move(cells), true, bound);
          continue;
        }
        const auto report = make_bound_report(m.count, m.n, bound);
        out.add(std::move(cells), report.pass, bound - m.ci_upper);
      } catch (const Error& err) {
        out.add_error(std::move(cells), err);
      }
    }
  }
  return out.take();
}

// ---- wap_check --------------------------------------------------------------

Table run(const ExperimentConfig& e, const WapConfig& c, unsigned workers) {
  const RngStream base(e.seed, name_stream(e.name));
  TableBuilder out(e, {"test", "d", "r", "alpha", "size", "outer_n", "inner_n", "estimate",
                       "combined_standard_error", "lr_beta"});
  for (std::size_t pi = 0; pi < c.points.size(); ++pi) {
    const auto [d, r] = c.points[pi];
    for (std::size_t ti = 0; ti < c.tests.size(); ++ti) {
      Cells cells{{"test", label(c.tests[ti])}, {"d", num(std::uint64_t{d})}, {"r", num(r)},
                  {"alpha", num(c.alpha)}, {"outer_n", num(c.outer_n)}, {"inner_n", num(c.inner_n)}};
      try {
        const TestSpec test =
            build_test(c.tests[ti], d, c.alpha, base.child(kCalibration).child(ti).child(pi), workers);
        const double size = size_for_beta(test, c.size_n, base.child(kSize).child(ti).child(pi), workers);
        const auto w = wap_average_power(test, r, c.outer_n, c.inner_n, base.child(kShared).child(pi), workers);
        const double beta = beta_at(d, size, r);
        cells["size"] = num(size);
        cells["estimate"] = num(w.estimate);
        cells["combined_standard_error"] = num(w.combined_standard_error);
        cells["lr_beta"] = num(beta);
        const double slack = beta + 4.0 * w.combined_standard_error - w.estimate;
        out.add(std::move(cells), slack >= 0.0, slack);
      } catch (const Error& err) {
        out.add_error(std::move(cells), err);
      }
    }
  }
  return out.take();
}

// ---- lipschitz_check --------------------------------------------------------

Table run(const ExperimentConfig& e, const LipschitzConfig& c, unsigned workers) {
  const RngStream base(e.seed, name_stream(e.name));
  TableBuilder out(e, {"test", "d", "theta_1_norm", "theta_2_norm", "distance", "inner_n",
                       "power_1", "power_2", "delta", "combined_standard_error", "bound"});
  std::map<std::pair<std::size_t, std::size_t>, TestSpec> tests;
  for (std::uint64_t i = 0; i < c.panel; ++i) {
    RngCursor cursor(base.child(kPanel).child(i));
    const auto pick = [&](std::size_t count) {
      return std::min(count - 1, static_cast<std::size_t>(cursor.next_uniform() * static_cast<double>(count)));
    };
    const std::size_t ti = pick(c.tests.size());
    const std::size_t di = pick(c.d.size());
    const std::size_t d = c.d[di];
    Cells cells{{"test", label(c.tests[ti])}, {"d", num(std::uint64_t{d})}, {"inner_n", num(c.inner_n)}};
    try {
      std::vector<double> theta_1(d), direction(d), theta_2(d);
      const double coordinate_scale = c.signal_scale / std::sqrt(static_cast<double>(d));
      for (auto& v : theta_1) v = coordinate_scale * cursor.next_normal();
      sample_uniform_sphere(d, 1.0, cursor, direction);
      const double step = c.max_step * cursor.next_uniform();
      for (std::size_t k = 0; k < d; ++k) theta_2[k] = theta_1[k] + step * direction[k];

      auto it = tests.find({ti, di});
      if (it == tests.end()) {
        it = tests
                 .emplace(std::pair{ti, di},
                          build_test(c.tests[ti], d, c.alpha,
                                     base.child(kCalibration).child(ti).child(di), workers))
                 .first;
      }
      const ParameterPoint p1(theta_1), p2(theta_2);
      const auto rep = lipschitz_power_check(it->second, p1, p2, c.inner_n, base.child(kShared).child(i), workers);
      cells["theta_1_norm"] = num(p1.norm());
      cells["theta_2_norm"] = num(p2.norm());
      cells["distance"] = num(2.0 * rep.bound);
      cells["power_1"] = num(rep.power_1);
      cells["power_2"] = num(rep.power_2);
      cells["delta"] = num(rep.delta);
      cells["combined_standard_error"] = num(rep.combined_standard_error);
      cells["bound"] = num(rep.bound);
      out.add(std::move(cells), rep.pass, rep.bound + 4.0 * rep.combined_standard_error - rep.delta);
    } catch (const Error& err) {
      out.add_error(std::move(cells), err);
    }
  }
  return out.take();
}

}  // namespace

Table run_experiment(const ExperimentConfig& experiment, unsigned workers) {
  validate(experiment);
  return std::visit([&](const auto& params) { return run(experiment, params, workers); },
                    experiment.params);
}

}  // namespace hdlab
