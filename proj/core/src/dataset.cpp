#include "bvs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <unordered_map>

#include "bvs/csv.hpp"
#include "bvs/error.hpp"

namespace bvs {

using nlohmann::json;

// ---------------------------------------------------------------------------
// EncodingSpec

namespace {

ColumnRole parse_role(const std::string& s, const std::string& column) {
  if (s == "continuous") return ColumnRole::continuous;
  if (s == "binary") return ColumnRole::binary;
  if (s == "categorical") return ColumnRole::categorical;
  if (s == "ignore") return ColumnRole::ignore;
  throw ConfigError("encoding spec: unknown role '" + s + "' for column '" + column + "'");
}

const char* missing_name(MissingPolicy p) {
  return p == MissingPolicy::complete_case ? "complete-case" : "impute";
}

const char* kind_name(FactorKind k) {
  switch (k) {
    case FactorKind::continuous: return "continuous";
    case FactorKind::binary: return "binary";
    case FactorKind::dummy: return "dummy";
  }
  return "?";
}

}  // namespace

EncodingSpec parse_encoding_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("encoding spec: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") || !doc["columns"].is_object())
    throw ConfigError("encoding spec: expected an object with a \"columns\" map");

  EncodingSpec spec;
  for (const auto& [name, entry] : doc["columns"].items()) {
    ColumnEncoding enc;
    if (entry.is_string()) {
      enc.role = parse_role(entry.get<std::string>(), name);
    } else if (entry.is_object() && entry.contains("role")) {
      enc.role = parse_role(entry["role"].get<std::string>(), name);
      if (entry.contains("reference")) {
        const auto& ref = entry["reference"];
        enc.reference = ref.is_string() ? ref.get<std::string>() : ref.dump();
      }
    } else {
      throw ConfigError("encoding spec: column '" + name + "' needs a role");
    }
    spec.columns.emplace(name, std::move(enc));
  }
  if (doc.contains("missing")) {
    const auto m = doc["missing"].get<std::string>();
    if (m == "complete-case") spec.missing = MissingPolicy::complete_case;
    else if (m == "impute") spec.missing = MissingPolicy::impute;
    else throw ConfigError("encoding spec: unknown missing policy '" + m + "'");
  }
  if (doc.contains("outcome_labels")) {
    const auto& labels = doc["outcome_labels"];
    if (!labels.contains("positive") || !labels.contains("negative"))
      throw ConfigError("encoding spec: outcome_labels needs positive and negative");
    spec.outcome_labels = OutcomeLabels{labels["positive"].get<std::string>(), labels["negative"].get<std::string>()};
  }
  return spec;
}

EncodingSpec load_encoding_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open encoding spec: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_encoding_spec(buf.str());
}

const Standardization* EncodingLog::standardization_for(std::string_view factor) const {
  for (const auto& s : standardization)
    if (s.factor == factor) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Eigen::MatrixXd design, Eigen::VectorXd outcome, std::vector<FactorInfo> factors, EncodingLog log)
    : design_(std::move(design)), outcome_(std::move(outcome)), factors_(std::move(factors)), log_(std::move(log)) {
  if (static_cast<std::size_t>(design_.cols()) != factors_.size() + 1)
    throw DataError("dataset: design has " + std::to_string(design_.cols()) + " columns, expected " +
                    std::to_string(factors_.size() + 1));
  if (outcome_.size() != design_.rows()) throw DataError("dataset: outcome length does not match design rows");
  for (Eigen::Index i = 0; i < design_.rows(); ++i) {
    if (design_(i, 0) != 1.0) throw DataError("dataset: design column 0 must be the intercept (all ones)");
    if (outcome_[i] != 0.0 && outcome_[i] != 1.0) throw DataError("dataset: outcome values must be 0 or 1");
  }
  if (!design_.allFinite()) throw DataError("dataset: design contains non-finite values");
  std::set<std::string> seen;
  for (const auto& f : factors_)
    if (!seen.insert(f.name).second) throw DataError("dataset: duplicate factor name '" + f.name + "'");
}

std::vector<std::string> Dataset::factor_names() const {
  std::vector<std::string> names;
  names.reserve(factors_.size());
  for (const auto& f : factors_) names.push_back(f.name);
  return names;
}

std::optional<std::size_t> Dataset::factor_index(std::string_view name) const {
  for (std::size_t k = 0; k < factors_.size(); ++k)
    if (factors_[k].name == name) return k;
  return std::nullopt;
}

std::size_t Dataset::require_factor(std::string_view name) const {
  auto k = factor_index(name);
  if (!k) throw ConfigError("unknown factor '" + std::string(name) + "'");
  return *k;
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>((outcome_.array() != 0.0).count());
}

Dataset Dataset::subset_rows(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), design_.cols());
  Eigen::VectorXd outcome(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n()) throw DataError("dataset: row index out of range");
    const auto src = static_cast<Eigen::Index>(rows[r]);
    design.row(static_cast<Eigen::Index>(r)) = design_.row(src);
    outcome[static_cast<Eigen::Index>(r)] = outcome_[src];
  }
  return Dataset(std::move(design), std::move(outcome), factors_, log_);
}

Dataset Dataset::select_factors(std::span<const std::size_t> factors) const {
  Eigen::MatrixXd design(design_.rows(), static_cast<Eigen::Index>(factors.size() + 1));
  design.col(0) = design_.col(0);
  std::vector<FactorInfo> info;
  info.reserve(factors.size());
  for (std::size_t j = 0; j < factors.size(); ++j) {
    if (factors[j] >= num_factors()) throw DataError("dataset: factor index out of range");
    design.col(static_cast<Eigen::Index>(j + 1)) = design_.col(static_cast<Eigen::Index>(factors[j] + 1));
    info.push_back(factors_[factors[j]]);
  }
  return Dataset(std::move(design), outcome_, std::move(info), log_);
}

Dataset make_dataset(const Eigen::MatrixXd& factors, const Eigen::VectorXd& outcome, std::vector<std::string> names) {
  const auto p = static_cast<std::size_t>(factors.cols());
  if (names.empty())
    for (std::size_t k = 0; k < p; ++k) names.push_back("x" + std::to_string(k + 1));
  if (names.size() != p) throw DataError("make_dataset: name count does not match factor columns");
  Eigen::MatrixXd design(factors.rows(), factors.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(factors.cols()) = factors;
  std::vector<FactorInfo> info;
  for (auto& name : names) info.push_back(FactorInfo{name, FactorKind::continuous, name, {}});
  return Dataset(std::move(design), outcome, std::move(info));
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

bool is_missing(const std::string& cell) {
  std::string_view s = cell;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s.empty() || s == "NA" || s == "NaN" || s == "nan";
}

struct RawColumn {
  std::string name;
  std::size_t source = 0;
  ColumnEncoding encoding;
};

std::vector<std::string> levels_in_order(const std::vector<std::string>& cells) {
  std::vector<std::string> levels;
  for (const auto& c : cells)
    if (std::find(levels.begin(), levels.end(), c) == levels.end()) levels.push_back(c);
  return levels;
}

std::string mode_of(const std::vector<std::string>& cells, const std::vector<bool>& missing) {
  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (missing[i]) continue;
    if (counts[cells[i]]++ == 0) order.push_back(cells[i]);
  }
  std::string best;
  std::size_t best_count = 0;
  for (const auto& level : order) {
    if (counts[level] > best_count) {
      best = level;
      best_count = counts[level];
    }
  }
  return best;
}

}  // namespace

Dataset load_csv_text(std::string_view text, const EncodingSpec& spec, std::string_view outcome_column) {
  const csv::Table table = csv::parse(text);
  const auto outcome_idx = table.column(outcome_column);
  if (!outcome_idx) throw DataError("outcome column '" + std::string(outcome_column) + "' not found");

  EncodingLog log;
  log.missing_policy = spec.missing;
  log.rows_read = table.rows.size();

  std::vector<RawColumn> used;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j == *outcome_idx) continue;
    auto it = spec.columns.find(table.header[j]);
    if (it == spec.columns.end()) {
      log.warnings.push_back("column '" + table.header[j] + "' not in encoding spec; ignored");
      continue;
    }
    if (it->second.role == ColumnRole::ignore) continue;
    used.push_back(RawColumn{table.header[j], j, it->second});
  }
  for (const auto& [name, enc] : spec.columns)
    if (!table.column(name) && name != outcome_column)
      log.warnings.push_back("encoding spec column '" + name + "' absent from file");

  // Outcome.
  const std::size_t rows = table.rows.size();
  std::vector<int> y(rows, -1);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string& cell = table.rows[i][*outcome_idx];
    if (is_missing(cell)) continue;
    if (spec.outcome_labels) {
      if (cell == spec.outcome_labels->positive) y[i] = 1;
      else if (cell == spec.outcome_labels->negative) y[i] = 0;
      else throw DataError("outcome column '" + std::string(outcome_column) + "': undeclared label '" + cell + "'");
    } else {
      const auto v = csv::parse_double(cell);
      if (!v || (*v != 0.0 && *v != 1.0))
        throw DataError("outcome column '" + std::string(outcome_column) + "' is not binary: value '" + cell + "'");
      y[i] = static_cast<int>(*v);
    }
  }

  // Missingness per used column.
  std::vector<std::vector<bool>> missing(used.size(), std::vector<bool>(rows, false));
  std::vector<bool> keep(rows, true);
  for (std::size_t i = 0; i < rows; ++i) {
    if (y[i] < 0) keep[i] = false;
    for (std::size_t c = 0; c < used.size(); ++c) {
      missing[c][i] = is_missing(table.rows[i][used[c].source]);
      if (missing[c][i] && spec.missing == MissingPolicy::complete_case) keep[i] = false;
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < rows; ++i)
    if (keep[i]) kept.push_back(i);
  log.rows_dropped = rows - kept.size();
  const auto n = static_cast<Eigen::Index>(kept.size());

  std::vector<Eigen::VectorXd> columns;
  std::vector<FactorInfo> factors;

  for (std::size_t c = 0; c < used.size(); ++c) {
    const RawColumn& col = used[c];
    std::vector<std::string> cells;
    std::vector<bool> miss;
    cells.reserve(kept.size());
    for (std::size_t i : kept) {
      cells.push_back(table.rows[i][col.source]);
      miss.push_back(missing[c][i]);
    }

    if (col.encoding.role == ColumnRole::continuous) {
      Eigen::VectorXd v(n);
      double sum = 0.0;
      std::size_t observed = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (miss[static_cast<std::size_t>(i)]) continue;
        const auto x = csv::parse_double(cells[static_cast<std::size_t>(i)]);
        if (!x || !std::isfinite(*x))
          throw DataError("column '" + col.name + "': non-numeric value '" + cells[static_cast<std::size_t>(i)] + "'");
        v[i] = *x;
        sum += *x;
        ++observed;
      }
      if (observed < static_cast<std::size_t>(n)) {
        if (observed == 0) throw DataError("column '" + col.name + "': no observed values");
        const double fill = sum / static_cast<double>(observed);
        for (Eigen::Index i = 0; i < n; ++i)
          if (miss[static_cast<std::size_t>(i)]) v[i] = fill;
        log.cells_imputed += static_cast<std::size_t>(n) - observed;
      }
      columns.push_back(std::move(v));
      factors.push_back(FactorInfo{col.name, FactorKind::continuous, col.name, {}});
      continue;
    }

    // Binary and categorical columns: impute missing cells with the mode.
    if (std::find(miss.begin(), miss.end(), true) != miss.end()) {
      const std::string fill = mode_of(cells, miss);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (miss[i]) {
          cells[i] = fill;
          ++log.cells_imputed;
        }
      }
    }
    std::vector<std::string> levels = levels_in_order(cells);
    if (levels.size() <= 1) {
      log.warnings.push_back("column '" + col.name + "' has a single level; dropped");
      continue;
    }

    if (col.encoding.role == ColumnRole::binary) {
      const bool numeric01 = std::all_of(levels.begin(), levels.end(), [](const std::string& s) {
        const auto v = csv::parse_double(s);
        return v && (*v == 0.0 || *v == 1.0);
      });
      if (levels.size() > 2)
        throw DataError("column '" + col.name + "' declared binary but has " + std::to_string(levels.size()) + " levels");
      Eigen::VectorXd v(n);
      std::string level;
      if (numeric01 && !col.encoding.reference) {
        for (Eigen::Index i = 0; i < n; ++i) v[i] = *csv::parse_double(cells[static_cast<std::size_t>(i)]);
      } else {
        const std::string reference = col.encoding.reference.value_or(levels.front());
        if (std::find(levels.begin(), levels.end(), reference) == levels.end())
          throw DataError("column '" + col.name + "': reference level '" + reference + "' not observed");
        level = levels[0] == reference ? levels[1] : levels[0];
        for (Eigen::Index i = 0; i < n; ++i) v[i] = cells[static_cast<std::size_t>(i)] == reference ? 0.0 : 1.0;
        log.expansions.push_back(CategoricalExpansion{col.name, reference, levels, {col.name}});
      }
      columns.push_back(std::move(v));
      factors.push_back(FactorInfo{col.name, FactorKind::binary, col.name, level});
      continue;
    }

    // Categorical: reference-level dummy coding, dummies named <column><level index>.
    const std::string reference = col.encoding.reference.value_or(levels.front());
    if (std::find(levels.begin(), levels.end(), reference) == levels.end())
      throw DataError("column '" + col.name + "': reference level '" + reference + "' not observed");
    CategoricalExpansion expansion{col.name, reference, levels, {}};
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (levels[l] == reference) continue;
      Eigen::VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = cells[static_cast<std::size_t>(i)] == levels[l] ? 1.0 : 0.0;
      const std::string name = col.name + std::to_string(l);
      columns.push_back(std::move(v));
      factors.push_back(FactorInfo{name, FactorKind::dummy, col.name, levels[l]});
      expansion.dummy_names.push_back(name);
    }
    log.expansions.push_back(std::move(expansion));
  }

  Eigen::MatrixXd design(n, static_cast<Eigen::Index>(columns.size() + 1));
  design.col(0).setOnes();
  for (std::size_t j = 0; j < columns.size(); ++j) design.col(static_cast<Eigen::Index>(j + 1)) = columns[j];
  Eigen::VectorXd outcome(n);
  for (Eigen::Index i = 0; i < n; ++i) outcome[i] = y[kept[static_cast<std::size_t>(i)]];

  return Dataset(std::move(design), std::move(outcome), std::move(factors), std::move(log));
}

Dataset load_csv(const std::filesystem::path& path, const EncodingSpec& spec, std::string_view outcome_column) {
  if (!std::filesystem::exists(path)) throw DataError("data file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_csv_text(buf.str(), spec, outcome_column);
}

// ---------------------------------------------------------------------------
// Standardization

Dataset standardize(const Dataset& ds) {
  EncodingLog log = ds.encoding_log();
  log.standardization.clear();
  const auto n = static_cast<double>(ds.n());
  for (std::size_t k = 0; k < ds.num_factors(); ++k) {
    const FactorInfo& f = ds.factors()[k];
    if (f.kind != FactorKind::continuous) continue;
    const auto col = ds.design().col(static_cast<Eigen::Index>(k + 1));
    if (ds.n() < 2) throw DataError("standardize: column '" + f.name + "' needs at least two rows");
    const double mean = col.sum() / n;
    const double ss = (col.array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DataError("standardize: column '" + f.name + "' has zero variance");
    log.standardization.push_back(Standardization{f.name, mean, sd});
  }
  Dataset raw(ds.design(), ds.outcome(), ds.factors(), log);
  return apply_standardization(raw, log);
}

Dataset apply_standardization(const Dataset& raw, const EncodingLog& log) {
  Eigen::MatrixXd design = raw.design();
  for (const auto& s : log.standardization) {
    const auto k = raw.factor_index(s.factor);
    if (!k) throw DataError("apply_standardization: factor '" + s.factor + "' missing from data");
    auto col = design.col(static_cast<Eigen::Index>(*k + 1));
    for (Eigen::Index i = 0; i < col.size(); ++i) col[i] = (col[i] - s.mean) / s.sd;
  }
  return Dataset(std::move(design), raw.outcome(), raw.factors(), log);
}

Eigen::VectorXd standardize_row(const Eigen::VectorXd& raw_design_row, const Dataset& trained) {
  if (static_cast<std::size_t>(raw_design_row.size()) != trained.num_factors() + 1)
    throw DataError("standardize_row: row has wrong length");
  Eigen::VectorXd row = raw_design_row;
  for (const auto& s : trained.encoding_log().standardization) {
    const auto k = static_cast<Eigen::Index>(trained.require_factor(s.factor) + 1);
    row[k] = (row[k] - s.mean) / s.sd;
  }
  return row;
}

// ---------------------------------------------------------------------------
// Correlations

CorrelationReport correlation_matrix(const Dataset& ds, double threshold) {
  if (ds.n() < 3) throw DataError("correlation_matrix: need at least 3 rows");
  const auto p = static_cast<Eigen::Index>(ds.num_factors());
  const Eigen::MatrixXd x = ds.design().rightCols(p);
  const Eigen::RowVectorXd means = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - means;
  const Eigen::VectorXd norms = centered.colwise().norm();

  CorrelationReport report;
  report.threshold = threshold;
  report.r = Eigen::MatrixXd::Identity(p, p);
  std::vector<bool> defined(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    defined[static_cast<std::size_t>(j)] = norms[j] > 0.0;
    if (!defined[static_cast<std::size_t>(j)]) report.undefined_factors.push_back(ds.factors()[static_cast<std::size_t>(j)].name);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a + 1; b < p; ++b) {
      if (!defined[static_cast<std::size_t>(a)] || !defined[static_cast<std::size_t>(b)]) {
        report.r(a, b) = report.r(b, a) = nan;
        continue;
      }
      double r = centered.col(a).dot(centered.col(b)) / (norms[a] * norms[b]);
      r = std::clamp(r, -1.0, 1.0);
      report.r(a, b) = report.r(b, a) = r;
      ++report.pairs_counted;
      if (std::abs(r) > threshold) ++report.pairs_above;
    }
  }
  report.fraction_above =
      report.pairs_counted ? static_cast<double>(report.pairs_above) / static_cast<double>(report.pairs_counted) : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Export

std::string dataset_to_json(const Dataset& ds) {
  json doc;
  doc["n"] = ds.n();
  doc["P"] = ds.num_factors();
  json factors = json::array();
  for (const auto& f : ds.factors())
    factors.push_back({{"name", f.name}, {"kind", kind_name(f.kind)}, {"source", f.source_column}, {"level", f.level}});
  doc["factors"] = factors;
  std::vector<int> y(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) y[i] = ds.outcome_at(i) ? 1 : 0;
  doc["outcome"] = y;
  json design = json::array();
  for (Eigen::Index j = 0; j < ds.design().cols(); ++j) {
    std::vector<double> col(ds.design().col(j).data(), ds.design().col(j).data() + ds.design().rows());
    design.push_back(col);
  }
  doc["design"] = design;

  const EncodingLog& log = ds.encoding_log();
  json jlog;
  jlog["missing_policy"] = missing_name(log.missing_policy);
  jlog["rows_read"] = log.rows_read;
  jlog["rows_dropped"] = log.rows_dropped;
  jlog["cells_imputed"] = log.cells_imputed;
  json exp = json::array();
  for (const auto& e : log.expansions)
    exp.push_back({{"source", e.source_column}, {"reference", e.reference}, {"levels", e.levels}, {"dummies", e.dummy_names}});
  jlog["expansions"] = exp;
  json stdz = json::array();
  for (const auto& s : log.standardization) stdz.push_back({{"factor", s.factor}, {"mean", s.mean}, {"sd", s.sd}});
  jlog["standardization"] = stdz;
  jlog["warnings"] = log.warnings;
  doc["encoding_log"] = jlog;
  return doc.dump(2);
}

}  // namespace bvs
