#include "hdlab/geometry.hpp"

#include <cmath>
#include <numbers>

#include "hdlab/error.hpp"
#include "hdlab/hypothesis_tests.hpp"
#include "hdlab/parallel.hpp"
#include "hdlab/stats.hpp"

namespace hdlab {
namespace {

void check_exponent(double p) { require(p > 0.0, "p must lie in (0, inf]"); }

double log_unit_volume_radius(std::size_t d, double p) {
  if (std::isinf(p)) return -std::numbers::ln2;
  const double dd = static_cast<double>(d);
  return -std::numbers::ln2 + std::lgamma(1.0 + dd / p) / dd - std::lgamma(1.0 + 1.0 / p);
}

VolumeEstimate from_hits(std::uint64_t hits, std::uint64_t n) {
  VolumeEstimate out;
  out.n = n;
  out.hits = hits;
  out.value = static_cast<double>(hits) / static_cast<double>(n);
  out.standard_error = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(n));
  const auto ci = wilson_interval(hits, n);
  out.ci_lower = ci.lower;
  out.ci_upper = ci.upper;
  return out;
}

enum class Support { ball, sphere };

VolumeEstimate threshold_fraction(Support support, std::size_t d, double p, double r, double s,
                                  std::uint64_t n, const RngStream& rng, unsigned workers) {
  require(d >= 1, "dimension must be >= 1");
  check_exponent(p);
  require(r > 0.0, "radius must be > 0");
  require(s >= 0.0, "threshold must be >= 0");
  require(n >= 1000, "threshold fraction requires n >= 1000");
  const auto hits = parallel_count(
      n, workers, [d] { return std::vector<double>(d); },
      [&](std::uint64_t i, std::vector<double>& x) {
        RngCursor cursor(rng.child(i));
        if (support == Support::ball) {
          sample_uniform_ball(d, r, cursor, x);
        } else {
          sample_uniform_sphere(d, r, cursor, x);
        }
        return p_norm(x, p) >= s;
      });
  return from_hits(hits, n);
}

}  // namespace

double pball_log_volume(const BallSpec& spec) {
  require(spec.d >= 1, "ball dimension must be >= 1");
  check_exponent(spec.p);
  require(spec.r > 0.0, "ball radius must be > 0");
  const double dd = static_cast<double>(spec.d);
  if (std::isinf(spec.p)) return dd * std::log(2.0 * spec.r);
  return dd * (std::numbers::ln2 + std::lgamma(1.0 + 1.0 / spec.p)) -
         std::lgamma(1.0 + dd / spec.p) + dd * std::log(spec.r);
}

double unit_volume_radius(std::size_t d, double p) {
  require(d >= 1, "dimension must be >= 1");
  check_exponent(p);
  if (std::isinf(p)) return 0.5;
  return std::exp(log_unit_volume_radius(d, p));
}

ScalingFactor scaling_factor_u(std::size_t d, double p) {
  require(d >= 1, "dimension must be >= 1");
  require(p > 0.0 && std::isfinite(p), "scaling factor requires p in (0, inf)");
  const double dd = static_cast<double>(d);
  const double growth = std::pow(dd, 0.5 / p - 0.25);
  ScalingFactor out;
  out.value = std::exp(log_unit_volume_radius(d, 2.0) - log_unit_volume_radius(d, p)) * growth;
  if (p >= 2.0) {
    out.lower_bound = std::pow(dd / p, 0.5 - 1.0 / p) * std::tgamma(1.0 / p + 1.0) /
                      std::tgamma(1.5) * growth;
  }
  return out;
}

void sample_uniform_sphere(std::size_t d, double r, RngCursor& cursor, std::span<double> out) {
  require(r > 0.0, "sphere radius must be > 0");
  require(out.size() == d && d >= 1, "sphere sample buffer has the wrong length");
  for (;;) {
    double ss = 0.0;
    for (auto& v : out) {
      v = cursor.next_normal();
      ss += v * v;
    }
    if (ss > 0.0) {
      const double scale = r / std::sqrt(ss);
      for (auto& v : out) v *= scale;
      return;
    }
  }
}

std::vector<double> sample_uniform_sphere(std::size_t d, double r, const RngStream& rng) {
  std::vector<double> out(d);
  RngCursor cursor(rng);
  sample_uniform_sphere(d, r, cursor, out);
  return out;
}

void sample_uniform_ball(std::size_t d, double r, RngCursor& cursor, std::span<double> out) {
  sample_uniform_sphere(d, r, cursor, out);
  const double radial = std::exp(std::log(cursor.next_uniform()) / static_cast<double>(d));
  for (auto& v : out) v *= radial;
}

std::vector<double> sample_uniform_ball(std::size_t d, double r, const RngStream& rng) {
  std::vector<double> out(d);
  RngCursor cursor(rng);
  sample_uniform_ball(d, r, cursor, out);
  return out;
}

std::vector<VolumeEstimate> intersection_volume_curve(std::size_t d, double p,
                                                      std::span<const double> ts,
                                                      std::uint64_t n, const RngStream& rng,
                                                      unsigned workers) {
  require(d >= 1, "dimension must be >= 1");
  check_exponent(p);
  require(n >= 1000, "intersection volume requires n >= 1000");
  for (double t : ts) require(t >= 0.0, "intersection scale t must be >= 0");

  const double r2 = unit_volume_radius(d, 2.0);
  const double rp = unit_volume_radius(d, p);
  std::vector<double> thresholds;
  for (double t : ts) thresholds.push_back(t * rp);

  const unsigned chunks = std::max(1u, workers);
  std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(ts.size(), 0));
  parallel_chunks(n, workers, [&](std::uint64_t begin, std::uint64_t end, std::size_t chunk) {
    std::vector<double> x(d);
    auto& counts = partial[chunk];
    for (std::uint64_t i = begin; i < end; ++i) {
      RngCursor cursor(rng.child(i));
      sample_uniform_ball(d, r2, cursor, x);
      const double norm = p_norm(x, p);
      for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (norm <= thresholds[k]) ++counts[k];
      }
    }
  });

  std::vector<VolumeEstimate> out;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::uint64_t hits = 0;
    for (const auto& c : partial) hits += c[k];
    out.push_back(from_hits(hits, n));
  }
  return out;
}

VolumeEstimate intersection_volume_ratio(std::size_t d, double p, double t, std::uint64_t n,
                                         const RngStream& rng, unsigned workers) {
  const double ts[] = {t};
  return intersection_volume_curve(d, p, ts, n, rng, workers).front();
}

VolumeEstimate pnorm_threshold_fraction(std::size_t d, double p, double r, double s,
                                        std::uint64_t n, const RngStream& rng, unsigned workers) {
  return threshold_fraction(Support::ball, d, p, r, s, n, rng, workers);
}

VolumeEstimate pnorm_threshold_fraction_sphere(std::size_t d, double p, double r, double s,
                                               std::uint64_t n, const RngStream& rng,
                                               unsigned workers) {
  return threshold_fraction(Support::sphere, d, p, r, s, n, rng, workers);
}

double max_pnorm_on_ball(std::size_t d, double p, double r) {
  check_exponent(p);
  if (std::isinf(p) || p >= 2.0) return r;
  return r * std::pow(static_cast<double>(d), 1.0 / p - 0.5);
}

}  // namespace hdlab
