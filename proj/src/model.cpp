#include "hdlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdlab/error.hpp"

namespace hdlab {

ParameterPoint::ParameterPoint(std::vector<double> values) : values_(std::move(values)) {
  require(!values_.empty(), "parameter point must have dimension >= 1");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    require(std::isfinite(values_[i]),
            "parameter point entry " + std::to_string(i) + " is not finite");
  }
}

ParameterPoint ParameterPoint::zero(std::size_t d) {
  return ParameterPoint(std::vector<double>(d, 0.0));
}

double ParameterPoint::squared_norm() const noexcept { return power_sum(values_, 2.0); }

double ParameterPoint::norm() const noexcept { return std::sqrt(squared_norm()); }

double DimensionRule::operator()(std::size_t d) const {
  require(d >= 1, "dimension must be >= 1");
  const double dd = static_cast<double>(d);
  double value = coefficient;
  if (exponent != 0.0) value *= std::pow(dd, exponent);
  if (log_power != 0.0) value *= std::pow(std::log(dd), log_power);
  return value;
}

AlternativeRule AlternativeRule::zero() { return AlternativeRule{}; }

AlternativeRule AlternativeRule::dense(DimensionRule coordinate) {
  AlternativeRule rule;
  rule.family_ = AlternativeFamily::dense;
  rule.amplitude_ = coordinate;
  return rule;
}

AlternativeRule AlternativeRule::dense(double c, double gamma) {
  require(c >= 0.0, "dense amplitude scale must be >= 0");
  return dense(DimensionRule{c, gamma, 0.0});
}

AlternativeRule AlternativeRule::sparse_spike(std::size_t k, DimensionRule amplitude) {
  require(k >= 1, "sparse spike count must be >= 1");
  AlternativeRule rule;
  rule.family_ = AlternativeFamily::sparse_spike;
  rule.spike_count_ = k;
  rule.amplitude_ = amplitude;
  return rule;
}

AlternativeRule AlternativeRule::custom(std::map<std::size_t, std::vector<double>> vectors) {
  for (const auto& [d, v] : vectors) {
    require(v.size() == d, "custom vector for d=" + std::to_string(d) + " has wrong length");
  }
  AlternativeRule rule;
  rule.family_ = AlternativeFamily::custom;
  rule.custom_ = std::move(vectors);
  return rule;
}

ParameterPoint realize_alternative(const AlternativeRule& rule, std::size_t d) {
  require(d >= 1, "dimension must be >= 1");
  switch (rule.family()) {
    case AlternativeFamily::zero:
      return ParameterPoint::zero(d);
    case AlternativeFamily::dense:
      return ParameterPoint(std::vector<double>(d, rule.amplitude()(d)));
    case AlternativeFamily::sparse_spike: {
      require(rule.spike_count() <= d, "sparse spike count k=" +
                                           std::to_string(rule.spike_count()) +
                                           " exceeds dimension d=" + std::to_string(d));
      std::vector<double> v(d, 0.0);
      std::fill_n(v.begin(), rule.spike_count(), rule.amplitude()(d));
      return ParameterPoint(std::move(v));
    }
    case AlternativeFamily::custom: {
      const auto it = rule.custom_vectors().find(d);
      require(it != rule.custom_vectors().end(),
              "custom alternative has no vector for d=" + std::to_string(d));
      return ParameterPoint(it->second);
    }
  }
  fail(ErrorKind::invalid_input, "unknown alternative family");
}

void draw_observation(std::span<const double> theta, const RngStream& rng, std::span<double> out) {
  RngCursor cursor(rng);
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] + cursor.next_normal();
}

std::vector<double> draw_observation(const ParameterPoint& theta, const RngStream& rng) {
  std::vector<double> y(theta.dim());
  draw_observation(theta.values(), rng, y);
  return y;
}

double power_sum(std::span<const double> x, double p) noexcept {
  double s = 0.0;
  if (p == 2.0) {
    for (double v : x) s += v * v;
  } else if (p == 1.0) {
    for (double v : x) s += std::fabs(v);
  } else if (p == 4.0) {
    for (double v : x) {
      const double v2 = v * v;
      s += v2 * v2;
    }
  } else {
    for (double v : x) s += std::pow(std::fabs(v), p);
  }
  return s;
}

ConsistencyDiagnostics consistency_diagnostics(const AlternativeRule& rule, double p,
                                               std::span<const std::size_t> d_grid) {
  require(p > 0.0 && std::isfinite(p), "consistency diagnostics require p in (0, inf)");
  for (std::size_t i = 1; i < d_grid.size(); ++i) {
    require(d_grid[i] > d_grid[i - 1], "d_grid must be strictly increasing");
  }
  ConsistencyDiagnostics out;
  out.p = p;
  out.d_grid.assign(d_grid.begin(), d_grid.end());
  for (std::size_t d : d_grid) {
    const ParameterPoint theta = realize_alternative(rule, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    const double l2 = theta.squared_norm();
    const double lp = power_sum(theta.values(), p);
    out.lr_criterion.push_back(scale * l2);
    out.p_criterion.push_back(scale * std::max(l2, lp));
  }
  return out;
}

std::vector<std::size_t> default_d_grid() {
  std::vector<std::size_t> grid;
  for (std::size_t d = 16; d <= 4096; d *= 2) grid.push_back(d);
  return grid;
}

bool grows_on_grid(std::span<const double> values) {
  if (values.size() < 2) return false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) return false;
  }
  return values.back() > values.front();
}

}  // namespace hdlab
