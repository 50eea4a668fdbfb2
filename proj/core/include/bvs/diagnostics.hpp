#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bvs/dataset.hpp"
#include "bvs/sampler.hpp"

namespace bvs {

struct LeverageReport {
  Eigen::VectorXd h;  // hat-matrix diagonal, one entry per row
  double threshold = 0.0;
  std::vector<std::size_t> flagged;  // rows with h > threshold
  std::vector<std::string> groups;   // optional per-row labels for plotting
  bool ridge_fallback = false;
  std::vector<std::string> warnings;
};

struct LeverageOptions {
  // Flag rows with h > multiplier * columns / n.
  double threshold_multiplier = 2.0;
  double ridge = 1e-8;
  // Label rows by the level of this source column's dummy expansion.
  std::optional<std::string> group_by;
};

// Linear-model hat-matrix diagonal over the full design, intercept included:
// h_i = x_i (X'X)^-1 x_i'. Rank-deficient designs fall back to
// (X'X + ridge I) with a warning.
LeverageReport leverage(const Dataset& ds, const LeverageOptions& options = {});

struct AcceptanceRates {
  double add_delete = 0.0;
  double swap = 0.0;
  double overall = 0.0;
};

AcceptanceRates acceptance_rate(const ChainTelemetry& telemetry);
inline AcceptanceRates acceptance_rate(const PosteriorDraws& draws) { return acceptance_rate(draws.telemetry); }

struct EssResult {
  double ess = 0.0;
  bool degenerate = false;  // constant series; ess reported as its length
};

// Geyer's initial positive sequence estimator. Requires at least 10 values.
EssResult effective_sample_size(std::span<const double> series);

}  // namespace bvs
