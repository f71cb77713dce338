#include "hdlab/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hdlab/error.hpp"

namespace hdlab {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) noexcept {
  if (std::isnan(p) || p < 0.0 || p > 1.0) return std::numeric_limits<double>::quiet_NaN();
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }

  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    fail(ErrorKind::invalid_input, "gamma_q requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(a, x);
}

double chi_square_sf(double x, double k) {
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * k, 0.5 * x);
}

double chi_square_upper_quantile(double alpha, double k) {
  require(alpha > 0.0 && alpha < 1.0, "chi-square quantile requires alpha in (0,1)");
  require(k > 0.0, "chi-square quantile requires k > 0");

  // Wilson-Hilferty starting point.
  const double z = -normal_quantile(alpha);
  const double h = 2.0 / (9.0 * k);
  const double wh = k * std::pow(std::max(1.0 - h + z * std::sqrt(h), 1e-3), 3);
  double lo = 0.5 * wh;
  double hi = 1.5 * wh + 1.0;
  for (int i = 0; i < 200 && chi_square_sf(lo, k) < alpha; ++i) lo *= 0.5;
  for (int i = 0; i < 200 && chi_square_sf(hi, k) > alpha; ++i) hi *= 2.0;

  for (int i = 0; i < 400 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (chi_square_sf(mid, k) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double noncentral_chi_square_sf(double x, double k, double lambda,
                                SeriesDiagnostics* diagnostics) {
  require(k > 0.0 && lambda >= 0.0, "noncentral chi-square requires k > 0, lambda >= 0");
  if (lambda == 0.0) return chi_square_sf(x, k);
  if (x <= 0.0) return 1.0;

  constexpr double kTailTolerance = 1e-17;
  constexpr long kMaxTerms = 10'000'000;

  const double mu = 0.5 * lambda;
  const long mode = static_cast<long>(std::floor(mu));
  const double mode_weight =
      std::exp(-mu + static_cast<double>(mode) * std::log(mu) - std::lgamma(mode + 1.0));
  const double half_x = 0.5 * x;
  auto central_tail = [&](long j) { return gamma_q(0.5 * k + static_cast<double>(j), half_x); };

  double sum = 0.0;
  long terms = 0;

  // Upward from the mode.
  double w = mode_weight;
  double upper_omitted = 0.0;
  for (long j = mode;; ++j) {
    sum += w * central_tail(j);
    ++terms;
    w *= mu / static_cast<double>(j + 1);  // weight of j + 1
    const double ratio = mu / static_cast<double>(j + 2);
    if (ratio < 1.0) {
      upper_omitted = w / (1.0 - ratio);
      if (upper_omitted < kTailTolerance) break;
    }
    if (terms > kMaxTerms) {
      fail(ErrorKind::numeric_failure,
           "noncentral chi-square series did not converge (upward) at lambda=" +
               std::to_string(lambda) + ", k=" + std::to_string(k) +
               ", terms=" + std::to_string(terms));
    }
  }

  // Downward from the mode; weights fall at least geometrically.
  w = mode_weight;
  double lower_omitted = 0.0;
  for (long j = mode; j > 0; --j) {
    w *= static_cast<double>(j) / mu;  // weight of j - 1
    const double ratio = static_cast<double>(j - 1) / mu;
    lower_omitted = w / (1.0 - ratio);
    if (lower_omitted < kTailTolerance) break;
    sum += w * central_tail(j - 1);
    ++terms;
    lower_omitted = 0.0;
    if (terms > kMaxTerms) {
      fail(ErrorKind::numeric_failure,
           "noncentral chi-square series did not converge (downward) at lambda=" +
               std::to_string(lambda) + ", k=" + std::to_string(k));
    }
  }

  if (diagnostics != nullptr) {
    diagnostics->terms = terms;
    diagnostics->mode = mode;
    diagnostics->omitted_mass = upper_omitted + lower_omitted;
  }
  return std::min(1.0, std::max(0.0, sum));
}

double normal_abs_moment(double q) {
  require(q > -1.0, "absolute moment requires q > -1");
  return std::exp(0.5 * q * std::numbers::ln2 + std::lgamma(0.5 * (q + 1.0))) /
         std::sqrt(std::numbers::pi);
}

}  // namespace hdlab
