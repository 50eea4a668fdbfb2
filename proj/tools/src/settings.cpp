#include "settings.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "bvs/error.hpp"

namespace bvs::cli {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "data", "spec", "outcome", "missing", "prior", "expected-model-size", "slab", "g", "v", "intercept-variance",
      "w-file", "iters", "burn-in", "thin", "moves-per-sweep", "swap-prob", "seed", "jobs", "out", "folds", "pooling",
      "subset", "bma", "ranking", "draws", "top", "inclusion-rows", "show", "next-highest", "refit-auc",
      "screen-threshold", "enter-p", "exit-p", "factor", "fixed-other", "grid", "scan-fixed-other", "group-by",
      "leverage-multiplier"};
  return keys;
}

template <class T>
T read_key(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <class T>
void merge(T& dst, const std::optional<T>& flag, const json& cfg, const char* key) {
  if (flag)
    dst = *flag;
  else if (cfg.contains(key) && !cfg[key].is_null())
    dst = read_key<T>(cfg, key);
}

template <class T>
void merge(std::optional<T>& dst, const std::optional<T>& flag, const json& cfg, const char* key) {
  if (flag)
    dst = flag;
  else if (cfg.contains(key) && !cfg[key].is_null())
    dst = read_key<T>(cfg, key);
}

// Lists may be given as JSON arrays or as comma-separated strings.
void merge_names(std::vector<std::string>& dst, const std::optional<std::vector<std::string>>& flag, const json& cfg,
                 const char* key) {
  if (flag) {
    dst = *flag;
  } else if (cfg.contains(key) && !cfg[key].is_null()) {
    dst = cfg[key].is_string() ? split_list(cfg[key].get<std::string>()) : read_key<std::vector<std::string>>(cfg, key);
  }
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (doc.contains("config") && doc.contains("config_hash")) doc = doc["config"];
  if (!doc.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
  for (const auto& item : doc.items())
    if (!known_keys().count(item.key()))
      throw ConfigError("config file '" + path + "': unknown key '" + item.key() + "'");
  return doc;
}

Settings resolve_settings(const FlagValues& f, const json& cfg) {
  Settings s;
  merge(s.data, f.data, cfg, "data");
  merge(s.spec, f.spec, cfg, "spec");
  merge(s.outcome, f.outcome, cfg, "outcome");
  merge(s.missing, f.missing, cfg, "missing");
  merge(s.prior_file, f.prior_file, cfg, "prior");
  merge(s.expected_model_size, f.expected_model_size, cfg, "expected-model-size");
  merge(s.slab, f.slab, cfg, "slab");
  merge(s.g, f.g, cfg, "g");
  merge(s.v, f.v, cfg, "v");
  merge(s.intercept_variance, f.intercept_variance, cfg, "intercept-variance");
  merge(s.w_file, f.w_file, cfg, "w-file");
  merge(s.iters, f.iters, cfg, "iters");
  merge(s.burn_in, f.burn_in, cfg, "burn-in");
  merge(s.thin, f.thin, cfg, "thin");
  merge(s.moves_per_sweep, f.moves_per_sweep, cfg, "moves-per-sweep");
  merge(s.swap_prob, f.swap_prob, cfg, "swap-prob");
  merge(s.seed, f.seed, cfg, "seed");
  merge(s.jobs, f.jobs, cfg, "jobs");
  merge(s.out, f.out, cfg, "out");
  merge(s.folds, f.folds, cfg, "folds");
  merge(s.pooling, f.pooling, cfg, "pooling");
  if (f.subset) {
    s.subset = f.subset;
  } else if (cfg.contains("subset") && !cfg["subset"].is_null()) {
    std::vector<std::string> names;
    merge_names(names, std::nullopt, cfg, "subset");
    s.subset = names;
  }
  merge(s.bma, f.bma, cfg, "bma");
  merge_names(s.ranking, f.ranking, cfg, "ranking");
  merge(s.draws, f.draws, cfg, "draws");
  merge(s.top, f.top, cfg, "top");
  merge(s.inclusion_rows, f.inclusion_rows, cfg, "inclusion-rows");
  merge_names(s.show, f.show, cfg, "show");
  merge(s.next_highest, f.next_highest, cfg, "next-highest");
  merge(s.refit_auc, f.refit_auc, cfg, "refit-auc");
  merge(s.screen_threshold, f.screen_threshold, cfg, "screen-threshold");
  merge(s.enter_p, f.enter_p, cfg, "enter-p");
  merge(s.exit_p, f.exit_p, cfg, "exit-p");
  merge_names(s.factors, f.factors, cfg, "factor");
  merge(s.fixed_other, f.fixed_other, cfg, "fixed-other");
  merge(s.grid, f.grid, cfg, "grid");
  merge(s.scan_fixed_other, f.scan_fixed_other, cfg, "scan-fixed-other");
  merge(s.group_by, f.group_by, cfg, "group-by");
  merge(s.leverage_multiplier, f.leverage_multiplier, cfg, "leverage-multiplier");
  if (s.jobs == 0) s.jobs = 1;
  return s;
}

json settings_to_json(const Settings& s) {
  json j;
  j["data"] = s.data;
  j["spec"] = s.spec;
  j["outcome"] = s.outcome;
  j["missing"] = s.missing;
  j["prior"] = s.prior_file;
  j["expected-model-size"] = s.expected_model_size ? json(*s.expected_model_size) : json(nullptr);
  j["slab"] = s.slab;
  j["g"] = s.g ? json(*s.g) : json(nullptr);
  j["v"] = s.v;
  j["intercept-variance"] = s.intercept_variance;
  j["w-file"] = s.w_file;
  j["iters"] = s.iters;
  j["burn-in"] = s.burn_in;
  j["thin"] = s.thin;
  j["moves-per-sweep"] = s.moves_per_sweep;
  j["swap-prob"] = s.swap_prob;
  j["seed"] = s.seed;
  j["folds"] = s.folds;
  j["pooling"] = s.pooling;
  j["subset"] = s.subset ? json(*s.subset) : json(nullptr);
  j["bma"] = s.bma;
  j["ranking"] = s.ranking;
  j["draws"] = s.draws;
  j["top"] = s.top;
  j["inclusion-rows"] = s.inclusion_rows;
  j["show"] = s.show;
  j["next-highest"] = s.next_highest;
  j["refit-auc"] = s.refit_auc;
  j["screen-threshold"] = s.screen_threshold;
  j["enter-p"] = s.enter_p;
  j["exit-p"] = s.exit_p;
  j["factor"] = s.factors;
  j["fixed-other"] = s.fixed_other;
  j["grid"] = s.grid;
  j["scan-fixed-other"] = s.scan_fixed_other;
  j["group-by"] = s.group_by;
  j["leverage-multiplier"] = s.leverage_multiplier;
  return j;
}

std::string output_directory(const Settings& s) {
  if (!s.out.empty()) return s.out;
  if (const char* env = std::getenv("BVS_OUTPUT_DIR"); env && *env) return env;
  return "bvs-out";
}

}  // namespace bvs::cli
