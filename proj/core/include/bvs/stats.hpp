#pragma once

#include <span>

namespace bvs::stats {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Standard normal density, distribution function and upper tail.
double normal_pdf(double x);
double normal_cdf(double x);
double normal_sf(double x);  // 1 - Phi(x), accurate in the upper tail
double normal_quantile(double p);

// Two-sided p-value of a standard-normal test statistic.
double two_sided_normal_pvalue(double z);

// Upper tail of the chi-squared distribution with `df` degrees of freedom.
double chi_squared_sf(double x, double df);

double mean(std::span<const double> xs);
// Sample variance with the (n - 1) denominator; 0 for n < 2.
double sample_variance(std::span<const double> xs);

}  // namespace bvs::stats
