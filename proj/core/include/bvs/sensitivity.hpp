#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bvs/dataset.hpp"
#include "bvs/prior.hpp"
#include "bvs/sampler.hpp"

namespace bvs {

struct SensitivityCurve {
  std::string factor;
  std::vector<double> grid;
  std::vector<double> mpp_at;  // NaN where the grid point's chain failed
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> errors;  // per grid point; empty on success
  double fixed_w_other = 0.78;
};

std::vector<double> default_sensitivity_grid();  // 0.0, 0.1, ..., 1.0

// Re-estimates the MPP of `factor` with its prior inclusion probability set
// to each grid value and every other factor's fixed at `fixed_other`. Grid
// point i runs a fresh chain seeded derive_seed(chain.seed, i). `base`
// supplies the slab settings; its weights are replaced.
SensitivityCurve prior_sweep(const Dataset& ds, const std::string& factor, const std::vector<double>& grid,
                             double fixed_other, const ChainConfig& chain, const PriorConfig& base,
                             std::size_t jobs = 1);

enum class SensitivityClass { robust_in, robust_out, prior_driven };

struct SensitivityThresholds {
  double robust_in_min = 0.5;   // every interior MPP above this
  double robust_out_max = 0.1;  // every interior MPP below this
};

// Interior points are the grid values strictly inside (0, 1); at least three
// are required.
SensitivityClass classify_sensitivity(const SensitivityCurve& curve, const SensitivityThresholds& thresholds = {});

const char* to_string(SensitivityClass c);

}  // namespace bvs
