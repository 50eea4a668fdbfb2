#include "bvs/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bvs/error.hpp"
#include "bvs/parallel.hpp"
#include "bvs/summaries.hpp"

namespace bvs {

std::vector<double> default_sensitivity_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

SensitivityCurve prior_sweep(const Dataset& ds, const std::string& factor, const std::vector<double>& grid,
                             double fixed_other, const ChainConfig& chain, const PriorConfig& base,
                             std::size_t jobs) {
  const std::size_t k = ds.require_factor(factor);
  if (!(fixed_other > 0.0 && fixed_other < 1.0)) throw ConfigError("prior_sweep: fixed_other must lie in (0, 1)");
  if (grid.empty()) throw ConfigError("prior_sweep: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw ConfigError("prior_sweep: grid values must lie in [0, 1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("prior_sweep: grid must be strictly increasing");
  }

  SensitivityCurve curve;
  curve.factor = factor;
  curve.grid = grid;
  curve.fixed_w_other = fixed_other;
  curve.mpp_at.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  curve.errors.assign(grid.size(), "");
  for (std::size_t i = 0; i < grid.size(); ++i) curve.seeds.push_back(derive_seed(chain.seed, i));

  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    PriorConfig cfg = base;
    cfg.w.assign(ds.num_factors(), fixed_other);
    cfg.w[k] = grid[i];
    // Fixed weights replace the multiplicity rule; keep the recorded expected
    // size consistent with them.
    double expected = 0.0;
    for (double w : cfg.w) expected += w;
    cfg.expected_model_size = std::clamp(expected, std::numeric_limits<double>::min(),
                                         static_cast<double>(ds.num_factors()));
    ChainConfig point_chain = chain;
    point_chain.seed = curve.seeds[i];
    try {
      const PosteriorDraws draws = run_chain(ds, cfg, point_chain);
      curve.mpp_at[i] = mpp(draws)[k].mpp;
    } catch (const Error& e) {
      curve.errors[i] = e.what();
    }
  });
  return curve;
}

SensitivityClass classify_sensitivity(const SensitivityCurve& curve, const SensitivityThresholds& thresholds) {
  std::vector<double> interior;
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    if (curve.grid[i] > 0.0 && curve.grid[i] < 1.0 && !std::isnan(curve.mpp_at[i])) interior.push_back(curve.mpp_at[i]);
  if (interior.size() < 3) throw ConfigError("classify_sensitivity: need at least 3 interior grid points");
  const auto [lo, hi] = std::minmax_element(interior.begin(), interior.end());
  if (*lo > thresholds.robust_in_min) return SensitivityClass::robust_in;
  if (*hi < thresholds.robust_out_max) return SensitivityClass::robust_out;
  return SensitivityClass::prior_driven;
}

const char* to_string(SensitivityClass c) {
  switch (c) {
    case SensitivityClass::robust_in: return "robust-in";
    case SensitivityClass::robust_out: return "robust-out";
    case SensitivityClass::prior_driven: return "prior-driven";
  }
  return "?";
}

}  // namespace bvs
