#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hdlab/rng.hpp"

namespace hdlab {

struct BallSpec {
  std::size_t d = 1;
  double p = 2.0;  // (0, inf]
  double r = 1.0;
};

struct VolumeEstimate {
  double value = 0.0;
  bool is_exact = false;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  double standard_error = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

/// Natural log of vol(B_p^d(r)) = (2 Gamma(1 + 1/p) r)^d / Gamma(1 + d/p).
double pball_log_volume(const BallSpec& spec);

/// e_{d,p}: the radius at which the p-ball has volume one.
double unit_volume_radius(std::size_t d, double p);

struct ScalingFactor {
  double value = 0.0;
  /// Gamma-ratio lower bound, only valid for p >= 2.
  std::optional<double> lower_bound;
};

/// u_d = (e_{d,2} / e_{d,p}) d^{1/(2p) - 1/4}, together with the bound
/// (d/p)^{1/2 - 1/p} Gamma(1/p + 1) / Gamma(3/2) d^{1/(2p) - 1/4}.
ScalingFactor scaling_factor_u(std::size_t d, double p);

/// Uniform on the Euclidean sphere of radius r: normalized Gaussian draws
/// read from `cursor` (an all-zero draw is redrawn).
void sample_uniform_sphere(std::size_t d, double r, RngCursor& cursor, std::span<double> out);
std::vector<double> sample_uniform_sphere(std::size_t d, double r, const RngStream& rng);

/// Uniform on the Euclidean ball: sphere sample scaled by r U^{1/d}.
void sample_uniform_ball(std::size_t d, double r, RngCursor& cursor, std::span<double> out);
std::vector<double> sample_uniform_ball(std::size_t d, double r, const RngStream& rng);

/// vol(B_2^d(e_{d,2}) intersect t B_p^d(e_{d,p})) as the fraction of n
/// uniform samples of the unit-volume Euclidean ball with
/// ||x||_p <= t e_{d,p}. Sample i uses rng.child(i).
VolumeEstimate intersection_volume_ratio(std::size_t d, double p, double t, std::uint64_t n,
                                         const RngStream& rng, unsigned workers = 1);

/// The same estimate for several t on common samples.
std::vector<VolumeEstimate> intersection_volume_curve(std::size_t d, double p,
                                                      std::span<const double> ts,
                                                      std::uint64_t n, const RngStream& rng,
                                                      unsigned workers = 1);

/// Fraction of X uniform on B_2^d(r) with ||X||_p >= s.
VolumeEstimate pnorm_threshold_fraction(std::size_t d, double p, double r, double s,
                                        std::uint64_t n, const RngStream& rng,
                                        unsigned workers = 1);

/// Fraction of X uniform on the sphere of radius r with ||X||_p >= s.
VolumeEstimate pnorm_threshold_fraction_sphere(std::size_t d, double p, double r, double s,
                                               std::uint64_t n, const RngStream& rng,
                                               unsigned workers = 1);

/// Upper bound r d^{max(0, 1/p - 1/2)} on ||x||_p over B_2^d(r).
double max_pnorm_on_ball(std::size_t d, double p, double r);

}  // namespace hdlab
