#include "bvs/truncated_normal.hpp"

#include <cmath>

#include "bvs/error.hpp"
#include "bvs/stats.hpp"

namespace bvs {

namespace {

// Robert (1995) one-sided sampler with the optimal exponential rate.
double exponential_rejection(double lower, Rng& rng) {
  const double rate = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
  for (;;) {
    const double x = lower - std::log(uniform_open(rng)) / rate;
    const double d = x - rate;
    if (std::log(uniform_open(rng)) <= -0.5 * d * d) return x;
  }
}

}  // namespace

double sample_standard_normal_above(double lower, Rng& rng) {
  if (lower > kDeepTailThreshold) return exponential_rejection(lower, rng);
  // Invert the upper tail: u * Q(lower) never reaches 1, and small tail
  // masses keep full precision.
  const double x = -stats::normal_quantile(uniform_open(rng) * stats::normal_sf(lower));
  return x > lower ? x : std::nextafter(lower, INFINITY);
}

double sample_truncated_normal(double mu, double sigma, TruncationSide side, Rng& rng) {
  if (!(sigma > 0.0)) throw ConfigError("sample_truncated_normal: sigma must be positive");
  if (side == TruncationSide::positive) {
    const double x = mu + sigma * sample_standard_normal_above(-mu / sigma, rng);
    return x > 0.0 ? x : std::nextafter(0.0, 1.0);
  }
  const double x = mu - sigma * sample_standard_normal_above(mu / sigma, rng);
  return x < 0.0 ? x : -std::nextafter(0.0, 1.0);
}

}  // namespace bvs
