#pragma once

#include "bvs/rng.hpp"

namespace bvs {

enum class TruncationSide { positive, negative };

// Standardized truncation depth beyond which the exponential-rejection
// sampler replaces inverse-CDF sampling.
inline constexpr double kDeepTailThreshold = 5.0;

// Draw from N(mu, sigma^2) restricted to (0, inf) or (-inf, 0).
double sample_truncated_normal(double mu, double sigma, TruncationSide side, Rng& rng);

// Draw from N(0, 1) restricted to (lower, inf).
double sample_standard_normal_above(double lower, Rng& rng);

}  // namespace bvs
