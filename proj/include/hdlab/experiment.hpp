#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hdlab/hypothesis_tests.hpp"
#include "hdlab/model.hpp"
#include "hdlab/table.hpp"

namespace hdlab {

/// Test description as it appears in a config: a family, how to calibrate
/// it, and (for combined tests) the two children.
struct TestConfig {
  enum class Kind { p_norm, higher_criticism, combined };
  Kind kind = Kind::p_norm;
  double p = 2.0;
  double fraction = 0.5;
  Calibration calibration{CalibrationMethod::exact, 0};
  double critical_value = 0.0;  // used with CalibrationMethod::fixed
  std::optional<double> alpha;  // overrides the experiment's alpha
  std::vector<TestConfig> children;  // combined: {primary, enhancement}

  static TestConfig p_norm_test(double p, Calibration calibration);
  static TestConfig higher_criticism_test(double fraction, Calibration calibration);
  static TestConfig combined_test(TestConfig primary, TestConfig enhancement);
};

std::string label(const TestConfig& test);

/// Builds the concrete test at dimension d. Monte-Carlo calibration draws
/// from `rng` (children 0 and 1 for the two parts of a combined test).
TestSpec build_test(const TestConfig& test, std::size_t d, double alpha, const RngStream& rng,
                    unsigned workers = 1);

struct AlternativeConfig {
  AlternativeFamily family = AlternativeFamily::zero;
  std::size_t k = 1;
  DimensionRule amplitude = DimensionRule::constant(0.0);

  AlternativeRule rule() const;
};

std::string label(const AlternativeConfig& alternative);

enum class Trend { none, nondecreasing, nonincreasing };

/// Critical values on a (test x d x alpha) grid, optionally followed by a
/// null-rejection check against the binomial band at `band_level`.
struct CalibrateConfig {
  std::vector<TestConfig> tests;
  std::vector<std::size_t> d;
  std::vector<double> alpha{0.05};
  std::uint64_t size_n = 0;
  double band_level = 0.999;
};

/// Rejection frequencies on a (d x alpha x radius) grid, theta = r e_1, or
/// on (d x alpha) with `alternative`. Rows share their noise draws.
struct PowerCurveConfig {
  TestConfig test;
  std::vector<std::size_t> d;
  std::vector<double> alpha{0.05};
  std::vector<double> radius;
  std::optional<AlternativeConfig> alternative;
  std::uint64_t n = 100000;
  std::uint64_t size_n = 100000;
  Trend trend = Trend::none;
};

/// Intersection volumes vol(B_2(e_{d,2}) cap t B_p(e_{d,p})) along a d grid
/// on common samples. Without `t` the scaling factor u_d is used.
struct VolumeSweepConfig {
  double p = 4.0;
  std::vector<std::size_t> d;
  std::optional<double> t;
  std::uint64_t n = 100000;
  Trend trend = Trend::none;
  /// Last row must have a Wilson lower limit above the first row's value.
  bool final_exceeds_first = false;
};

/// Fraction of B_2^d(r_d) with ||x||_p >= s_d along a d grid. With a test,
/// the fraction is compared with the concentration bound at
/// epsilon = (1 - max beta) / 2.
struct Theorem2Config {
  double p = 4.0;
  std::vector<std::size_t> d;
  DimensionRule radius;
  DimensionRule threshold;
  std::uint64_t n = 100000;
  Trend trend = Trend::nonincreasing;
  std::optional<double> final_max;
  std::optional<TestConfig> test;
  double alpha = 0.05;
  std::uint64_t size_n = 100000;
};

/// Excess-power region measure against the concentration bound.
struct Prop4Config {
  std::vector<TestConfig> tests;
  std::vector<std::size_t> d;
  DimensionRule radius;
  double epsilon = 0.1;
  double alpha = 0.05;
  std::uint64_t outer_n = 1000;
  std::uint64_t inner_n = 1000;
  double decision_margin = 0.0;
  std::uint64_t size_n = 100000;
};

struct SpherePoint {
  std::size_t d = 1;
  double r = 1.0;
};

/// Sphere-averaged power against the LR power of the same size.
struct WapConfig {
  std::vector<TestConfig> tests;
  std::vector<SpherePoint> points;
  double alpha = 0.05;
  std::uint64_t outer_n = 1000;
  std::uint64_t inner_n = 1000;
  std::uint64_t size_n = 100000;
};

/// Randomized panel of (test, theta_1, theta_2) triples checked against the
/// Lipschitz bound ||theta_1 - theta_2||_2 / 2.
struct LipschitzConfig {
  std::vector<TestConfig> tests;
  std::vector<std::size_t> d;
  std::uint64_t panel = 50;
  std::uint64_t inner_n = 100000;
  double signal_scale = 2.0;
  double max_step = 1.0;
  double alpha = 0.05;
};

using ExperimentParams = std::variant<CalibrateConfig, PowerCurveConfig, VolumeSweepConfig,
                                      Theorem2Config, Prop4Config, WapConfig, LipschitzConfig>;

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  ExperimentParams params;
};

std::string_view kind_name(const ExperimentParams& params);

/// A config document: one experiment or a list of them sharing a seed.
struct SuiteConfig {
  std::uint64_t seed = 0;
  std::optional<std::string> output;
  std::vector<ExperimentConfig> experiments;
  /// Parsed from the single-experiment form; output is then a file.
  bool single = false;
};

/// Parses and fills defaults. Malformed text, unknown keys, missing keys and
/// wrong types raise config_parse naming the key path.
SuiteConfig parse_suite(std::string_view text);

/// Canonical JSON text: sorted keys, every default written out.
std::string to_text(const SuiteConfig& suite);
std::string to_text(const ExperimentConfig& experiment);

/// Checks every module precondition without running anything.
void validate(const ExperimentConfig& experiment);

/// FNV-1a 64 of the canonical experiment text (seed included, output path
/// and worker count excluded).
std::uint64_t config_hash(const ExperimentConfig& experiment);
std::string hash_hex(std::uint64_t hash);

/// Runs one experiment. Rows that raise are kept with their error kind in
/// `status` and pass = false.
Table run_experiment(const ExperimentConfig& experiment, unsigned workers = 1);

}  // namespace hdlab
