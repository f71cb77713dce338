#pragma once

namespace hdlab {

// Standard normal distribution.
double normal_cdf(double x) noexcept;
/// Upper tail 1 - Phi(x), accurate far into the right tail.
double normal_sf(double x) noexcept;
/// Inverse of normal_cdf (Wichura's AS 241, about 1e-16 relative accuracy).
/// Returns -inf / +inf at p = 0 / 1 and NaN outside [0, 1].
double normal_quantile(double p) noexcept;

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Upper tail P(chi2_k > x).
double chi_square_sf(double x, double k);

/// c with P(chi2_k > c) = alpha. Bisection on the upper tail to an absolute
/// tolerance of 1e-12, starting from a Wilson-Hilferty bracket.
double chi_square_upper_quantile(double alpha, double k);

struct SeriesDiagnostics {
  long terms = 0;
  long mode = 0;
  double omitted_mass = 0.0;
};

/// Upper tail P(chi2_k(lambda) > x) of the noncentral chi-square with
/// noncentrality lambda, as a Poisson(lambda/2) mixture of central tails.
/// The series starts at the Poisson mode and expands in both directions
/// until the omitted Poisson mass is below 1e-12. Throws numeric_failure if
/// that does not happen within the iteration cap.
double noncentral_chi_square_sf(double x, double k, double lambda,
                                SeriesDiagnostics* diagnostics = nullptr);

/// E|Z|^q for standard normal Z.
double normal_abs_moment(double q);

}  // namespace hdlab
