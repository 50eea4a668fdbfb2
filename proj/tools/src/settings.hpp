#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bvs::cli {

// Fully resolved options for one command. Keys in config files use the long
// flag names ("burn-in", "expected-model-size", ...).
struct Settings {
  // data
  std::string data;
  std::string spec;
  std::string outcome = "y";
  std::string missing;  // empty: whatever the encoding spec says

  // prior
  std::string prior_file;
  std::optional<double> expected_model_size;
  std::string slab = "gprior";
  std::optional<double> g;
  double v = 4.0;
  double intercept_variance = 100.0;
  std::string w_file;

  // chain
  std::size_t iters = 110'000;
  std::size_t burn_in = 10'000;
  std::size_t thin = 1;
  std::size_t moves_per_sweep = 5;
  double swap_prob = 0.5;

  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string out;

  // cross-validation
  std::size_t folds = 5;
  std::string pooling = "pooled";
  std::optional<std::vector<std::string>> subset;
  bool bma = false;
  std::vector<std::string> ranking;

  // report
  std::string draws;
  std::size_t top = 20;
  std::size_t inclusion_rows = 100;
  std::vector<std::string> show;
  std::size_t next_highest = 10;
  bool refit_auc = true;

  // baseline
  double screen_threshold = 0.003;
  double enter_p = 0.05;
  double exit_p = 0.10;

  // sensitivity
  std::vector<std::string> factors;
  double fixed_other = 0.78;
  std::vector<double> grid;
  std::vector<double> scan_fixed_other;

  // leverage
  std::string group_by;
  double leverage_multiplier = 2.0;
};

// Flags actually given on the command line; unset members fall through to
// the config file and then to the Settings defaults.
struct FlagValues {
  std::optional<std::string> data, spec, outcome, missing, prior_file, slab, w_file, out, pooling, draws, group_by;
  std::optional<double> expected_model_size, g, v, intercept_variance, swap_prob, screen_threshold, enter_p, exit_p,
      fixed_other, leverage_multiplier;
  std::optional<std::size_t> iters, burn_in, thin, moves_per_sweep, jobs, folds, top, inclusion_rows, next_highest;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::string>> subset, ranking, show, factors;
  std::optional<std::vector<double>> grid, scan_fixed_other;
  std::optional<bool> bma, refit_auc;
  std::optional<std::string> config;
};

// Reads a config document. A run manifest is accepted too; its "config"
// member is used.
nlohmann::json load_config_file(const std::string& path);

Settings resolve_settings(const FlagValues& flags, const nlohmann::json& config);

// Analytical settings as JSON. `jobs` and `out` do not affect results and are
// left out.
nlohmann::json settings_to_json(const Settings& s);

// Output directory: --out, then $BVS_OUTPUT_DIR, then "bvs-out".
std::string output_directory(const Settings& s);

std::vector<std::string> split_list(const std::string& text);

}  // namespace bvs::cli
