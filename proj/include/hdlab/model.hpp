#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hdlab/rng.hpp"

namespace hdlab {

/// Mean vector theta_d of the Gaussian sequence model y = theta + eps.
class ParameterPoint {
 public:
  /// Throws invalid_input on an empty or non-finite vector.
  explicit ParameterPoint(std::vector<double> values);

  static ParameterPoint zero(std::size_t d);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double squared_norm() const noexcept;
  double norm() const noexcept;

 private:
  std::vector<double> values_;
};

/// coefficient * d^exponent * (ln d)^log_power. The scalar sequences used to
/// build alternatives, radii and thresholds as functions of the dimension.
struct DimensionRule {
  double coefficient = 1.0;
  double exponent = 0.0;
  double log_power = 0.0;

  double operator()(std::size_t d) const;

  static DimensionRule constant(double c) { return {c, 0.0, 0.0}; }
};

enum class AlternativeFamily { zero, dense, sparse_spike, custom };

/// A rule d -> theta_d, i.e. an array of parameters indexed by dimension.
/// Signal coordinates always occupy the leading positions.
class AlternativeRule {
 public:
  static AlternativeRule zero();
  /// Every coordinate equals `coordinate(d)`.
  static AlternativeRule dense(DimensionRule coordinate);
  /// Dense with coordinate c * d^gamma.
  static AlternativeRule dense(double c, double gamma);
  /// `k` leading coordinates equal to `amplitude(d)`, zeros elsewhere.
  static AlternativeRule sparse_spike(std::size_t k, DimensionRule amplitude);
  /// Explicit vectors per dimension; dimensions not listed are invalid.
  static AlternativeRule custom(std::map<std::size_t, std::vector<double>> vectors);

  AlternativeFamily family() const noexcept { return family_; }
  const DimensionRule& amplitude() const noexcept { return amplitude_; }
  std::size_t spike_count() const noexcept { return spike_count_; }
  const std::map<std::size_t, std::vector<double>>& custom_vectors() const noexcept {
    return custom_;
  }

 private:
  AlternativeFamily family_ = AlternativeFamily::zero;
  DimensionRule amplitude_{0.0, 0.0, 0.0};
  std::size_t spike_count_ = 0;
  std::map<std::size_t, std::vector<double>> custom_;
};

ParameterPoint realize_alternative(const AlternativeRule& rule, std::size_t d);

/// y = theta + z with z_i = rng.normal(i).
std::vector<double> draw_observation(const ParameterPoint& theta, const RngStream& rng);
/// Allocation-free variant for Monte-Carlo kernels; `out.size()` must be d.
void draw_observation(std::span<const double> theta, const RngStream& rng, std::span<double> out);

struct ConsistencyDiagnostics {
  std::vector<std::size_t> d_grid;
  /// d^{-1/2} ||theta_d||_2^2
  std::vector<double> lr_criterion;
  /// d^{-1/2} max(||theta_d||_2^2, ||theta_d||_p^p)
  std::vector<double> p_criterion;
  double p = 2.0;
};

ConsistencyDiagnostics consistency_diagnostics(const AlternativeRule& rule, double p,
                                               std::span<const std::size_t> d_grid);

/// Powers of two from 16 to 4096.
std::vector<std::size_t> default_d_grid();

/// Desk-scale divergence: nondecreasing along the grid with a final value
/// strictly above the first.
bool grows_on_grid(std::span<const double> values);

/// sum |x_i|^p for finite p > 0.
double power_sum(std::span<const double> x, double p) noexcept;

}  // namespace hdlab
