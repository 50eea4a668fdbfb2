#include "bvs/prior.hpp"

#include <cmath>
#include <algorithm>
#include <json.hpp>
#include <limits>

#include "bvs/csv.hpp"
#include "bvs/dataset.hpp"
#include "bvs/error.hpp"

namespace bvs {

using nlohmann::json;

// ---------------------------------------------------------------------------
// ModelIndicator

ModelIndicator::ModelIndicator(std::size_t num_factors) : bits_(num_factors, 0) {}

ModelIndicator::ModelIndicator(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    b = b ? 1 : 0;
    size_ += b;
  }
}

ModelIndicator ModelIndicator::parse(std::string_view bits) {
  std::vector<std::uint8_t> out;
  out.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw ConfigError("model indicator: expected 0/1 string, got '" + std::string(bits) + "'");
    out.push_back(c == '1');
  }
  return ModelIndicator(std::move(out));
}

std::vector<std::size_t> ModelIndicator::included() const {
  std::vector<std::size_t> out;
  out.reserve(size_);
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (bits_[k]) out.push_back(k);
  return out;
}

std::vector<std::size_t> ModelIndicator::excluded() const {
  std::vector<std::size_t> out;
  out.reserve(bits_.size() - size_);
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (!bits_[k]) out.push_back(k);
  return out;
}

ModelIndicator ModelIndicator::with_flipped(std::size_t k) const {
  ModelIndicator out = *this;
  out.bits_[k] ^= 1;
  out.size_ = out.bits_[k] ? size_ + 1 : size_ - 1;
  return out;
}

ModelIndicator ModelIndicator::with_swapped(std::size_t in, std::size_t out_k) const {
  ModelIndicator out = *this;
  out.bits_[in] = 0;
  out.bits_[out_k] = 1;
  return out;
}

std::string ModelIndicator::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (bits_[k]) s[k] = '1';
  return s;
}

// ---------------------------------------------------------------------------
// PriorConfig

void PriorConfig::validate() const {
  for (std::size_t k = 0; k < w.size(); ++k)
    if (!(w[k] >= 0.0 && w[k] <= 1.0))
      throw ConfigError("prior: w[" + std::to_string(k) + "] = " + std::to_string(w[k]) + " outside [0, 1]");
  if (slab == SlabPolicy::g_prior && g && !(*g > 0.0)) throw ConfigError("prior: g must be positive");
  if (slab == SlabPolicy::diagonal && !(v > 0.0)) throw ConfigError("prior: slab variance v must be positive");
  if (!(intercept_variance > 0.0)) throw ConfigError("prior: intercept variance must be positive");
  if (!(expected_model_size > 0.0) || expected_model_size > static_cast<double>(w.size()))
    throw ConfigError("prior: expected model size must lie in (0, P]");
}

std::vector<double> multiplicity_weights(std::size_t num_factors, double expected_size) {
  if (!(expected_size > 0.0) || expected_size > static_cast<double>(num_factors))
    throw ConfigError("multiplicity_weights: need 0 < m <= P (m = " + std::to_string(expected_size) +
                      ", P = " + std::to_string(num_factors) + ")");
  return std::vector<double>(num_factors, expected_size / static_cast<double>(num_factors));
}

PriorConfig default_prior(std::size_t num_factors, double expected_size) {
  PriorConfig cfg;
  cfg.expected_model_size = std::min(expected_size, static_cast<double>(num_factors));
  if (num_factors > 0) cfg.w = multiplicity_weights(num_factors, cfg.expected_model_size);
  return cfg;
}

double log_prior_model(const ModelIndicator& gamma, const PriorConfig& cfg) {
  if (gamma.num_factors() != cfg.w.size()) throw ConfigError("log_prior_model: indicator and prior lengths differ");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double lp = 0.0;
  for (std::size_t k = 0; k < cfg.w.size(); ++k) {
    const double w = cfg.w[k];
    const bool in = gamma.test(k);
    if (w == 0.0) {
      if (in) return kNegInf;
    } else if (w == 1.0) {
      if (!in) return kNegInf;
    } else {
      lp += in ? std::log(w) : std::log1p(-w);
    }
  }
  return lp;
}

// ---------------------------------------------------------------------------
// Slab covariance

std::vector<Eigen::Index> active_columns(const ModelIndicator& gamma) {
  std::vector<Eigen::Index> cols;
  cols.reserve(gamma.size() + 1);
  cols.push_back(0);
  for (std::size_t k = 0; k < gamma.num_factors(); ++k)
    if (gamma.test(k)) cols.push_back(static_cast<Eigen::Index>(k + 1));
  return cols;
}

namespace {

// Cholesky of a Gram block with a relative pivot floor. Exact collinearity
// leaves a pivot at rounding level, which LLT alone does not always reject.
Eigen::LLT<Eigen::MatrixXd> checked_gram_llt(const Eigen::MatrixXd& gram) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Eigen::MatrixXd& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      const double pivot = l(i, i) * l(i, i);
      if (!(pivot > 1e-10 * gram(i, i))) {
        ok = false;
        break;
      }
    }
  }
  if (!ok)
    throw RankDeficientError(
        "g-prior slab: included design columns are collinear (X_A'X_A singular); "
        "use the diagonal slab policy or drop duplicated factors");
  return llt;
}

}  // namespace

SlabPrecision slab_precision(const Eigen::MatrixXd& active_gram, std::size_t n, const PriorConfig& cfg) {
  const Eigen::Index q = active_gram.rows();
  SlabPrecision out;
  if (cfg.slab == SlabPolicy::g_prior) {
    const double g = cfg.g_for(n);
    const auto llt = checked_gram_llt(active_gram);
    const Eigen::MatrixXd& l = llt.matrixLLT();
    double log_det_gram = 0.0;
    for (Eigen::Index i = 0; i < q; ++i) log_det_gram += 2.0 * std::log(l(i, i));
    out.precision = active_gram / g;
    out.log_det_covariance = static_cast<double>(q) * std::log(g) - log_det_gram;
  } else {
    out.precision = Eigen::MatrixXd::Zero(q, q);
    out.precision(0, 0) = 1.0 / cfg.intercept_variance;
    for (Eigen::Index i = 1; i < q; ++i) out.precision(i, i) = 1.0 / cfg.v;
    out.log_det_covariance = std::log(cfg.intercept_variance) + static_cast<double>(q - 1) * std::log(cfg.v);
  }
  return out;
}

Eigen::MatrixXd build_slab_covariance(const Dataset& ds, const ModelIndicator& gamma, const PriorConfig& cfg) {
  if (gamma.num_factors() != ds.num_factors())
    throw ConfigError("build_slab_covariance: indicator length does not match factor count");
  const auto cols = active_columns(gamma);
  const auto q = static_cast<Eigen::Index>(cols.size());
  if (cfg.slab == SlabPolicy::diagonal) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(q, q) * cfg.v;
    cov(0, 0) = cfg.intercept_variance;
    return cov;
  }
  const Eigen::MatrixXd xa = ds.design()(Eigen::all, cols);
  const Eigen::MatrixXd gram = xa.transpose() * xa;
  const auto llt = checked_gram_llt(gram);
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(q, q)) * cfg.g_for(ds.n());
  return 0.5 * (cov + cov.transpose());
}

// ---------------------------------------------------------------------------
// Serialization

std::string prior_to_json(const PriorConfig& cfg) {
  json doc;
  doc["w"] = cfg.w;
  doc["slab"] = cfg.slab == SlabPolicy::g_prior ? "gprior" : "diag";
  if (cfg.g) doc["g"] = *cfg.g;
  else doc["g"] = nullptr;
  doc["v"] = cfg.v;
  doc["expected_model_size"] = cfg.expected_model_size;
  doc["intercept_variance"] = cfg.intercept_variance;
  return doc.dump();
}

namespace {
void read_prior_fields(const json& doc, PriorConfig& cfg);
}  // namespace

PriorConfig prior_from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("prior config: invalid JSON: ") + e.what());
  }
  PriorConfig cfg;
  try {
    read_prior_fields(doc, cfg);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("prior config: ") + e.what());
  }
  return cfg;
}

namespace {

void read_prior_fields(const json& doc, PriorConfig& cfg) {
  if (doc.contains("w")) cfg.w = doc["w"].get<std::vector<double>>();
  if (doc.contains("slab")) {
    const auto s = doc["slab"].get<std::string>();
    if (s == "gprior") cfg.slab = SlabPolicy::g_prior;
    else if (s == "diag") cfg.slab = SlabPolicy::diagonal;
    else throw ConfigError("prior config: unknown slab policy '" + s + "'");
  }
  if (doc.contains("g") && !doc["g"].is_null()) cfg.g = doc["g"].get<double>();
  if (doc.contains("v")) cfg.v = doc["v"].get<double>();
  if (doc.contains("expected_model_size")) cfg.expected_model_size = doc["expected_model_size"].get<double>();
  if (doc.contains("intercept_variance")) cfg.intercept_variance = doc["intercept_variance"].get<double>();
}

}  // namespace

void apply_w_overrides(PriorConfig& cfg, const std::vector<std::string>& factor_names, std::string_view csv_text) {
  const csv::Table table = csv::parse(csv_text);
  const auto name_col = table.column("factor");
  const auto w_col = table.column("w");
  if (!name_col || !w_col) throw ConfigError("w-file: expected header 'factor,w'");
  if (cfg.w.size() != factor_names.size()) throw ConfigError("w-file: prior length does not match factor count");
  for (const auto& row : table.rows) {
    const auto it = std::find(factor_names.begin(), factor_names.end(), row[*name_col]);
    if (it == factor_names.end()) throw ConfigError("w-file: unknown factor '" + row[*name_col] + "'");
    const auto w = csv::parse_double(row[*w_col]);
    if (!w || *w < 0.0 || *w > 1.0) throw ConfigError("w-file: invalid w for '" + row[*name_col] + "'");
    cfg.w[static_cast<std::size_t>(it - factor_names.begin())] = *w;
  }
}

}  // namespace bvs
