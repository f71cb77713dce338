#include "hdlab/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <cmath>

#include "hdlab/error.hpp"

namespace hdlab {

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
  out.lower = std::min(out.lower, phat);
  out.upper = std::max(out.upper, phat);
  return out;
}

Interval binomial_acceptance_band(double p, std::uint64_t n, double level) {
  require(p >= 0.0 && p <= 1.0, "binomial band requires p in [0,1]");
  require(level > 0.0 && level < 1.0, "binomial band requires level in (0,1)");
  require(n > 0, "binomial band requires n > 0");
  const double tail = 0.5 * (1.0 - level);
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
  const double lo = boost::math::quantile(dist, tail);
  const double hi = boost::math::quantile(boost::math::complement(dist, tail));
  return {lo / static_cast<double>(n), hi / static_cast<double>(n)};
}

double sorted_quantile_type7(std::span<const double> sorted, double prob) {
  require(!sorted.empty(), "quantile of empty sample");
  require(prob >= 0.0 && prob <= 1.0, "quantile probability outside [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace hdlab
