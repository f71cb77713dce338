#pragma once

#include <cstdint>
#include <span>

namespace hdlab {

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Wilson score interval for `successes` out of `n` at normal quantile `z`
/// (1.959963984540054 for 95%).
Interval wilson_interval(std::uint64_t successes, std::uint64_t n,
                         double z = 1.959963984540054);

/// Two-sided acceptance band for a Binomial(n, p) count expressed as a
/// proportion: [lo, hi] such that P(X/n < lo) and P(X/n > hi) are each at
/// most (1 - level)/2. Uses exact binomial quantiles.
Interval binomial_acceptance_band(double p, std::uint64_t n, double level);

/// Type-7 (Hyndman-Fan) sample quantile of already sorted data.
double sorted_quantile_type7(std::span<const double> sorted, double prob);

}  // namespace hdlab
