#include "bvs/report.hpp"

#include <cmath>
#include <json.hpp>
#include <ostream>

#include "bvs/csv.hpp"
#include "bvs/error.hpp"

namespace bvs::report {

using csv::format_double;
using nlohmann::json;

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::string join_names(const ModelIndicator& g, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t k : g.included()) {
    if (!out.empty()) out += ';';
    out += names[k];
  }
  return out;
}

}  // namespace

void write_mpp_csv(std::ostream& os, const std::vector<FactorSummary>& summaries, const std::vector<std::size_t>& rows) {
  csv::write_row(os, {"factor", "mpp", "inclusion_count", "beta_mean_given_included", "beta_sd_given_included"});
  auto emit = [&](const FactorSummary& s) {
    csv::write_row(os, {s.name, format_double(s.mpp), std::to_string(s.inclusion_count), cell(s.beta_mean_given_included),
                        cell(s.beta_sd_given_included)});
  };
  if (rows.empty()) {
    for (const auto& s : summaries) emit(s);
  } else {
    for (std::size_t k : rows) emit(summaries.at(k));
  }
}

void write_jpp_csv(std::ostream& os, const std::vector<ModelSummary>& models, const std::vector<std::string>& names,
                   const std::vector<double>& refit_auc) {
  if (!refit_auc.empty() && refit_auc.size() != models.size())
    throw ConfigError("write_jpp_csv: one AUC per model required");
  std::vector<std::string> header{"rank", "factors", "indicator", "jpp", "visits"};
  if (!refit_auc.empty()) header.emplace_back("refit_auc");
  csv::write_row(os, header);
  for (std::size_t r = 0; r < models.size(); ++r) {
    const auto& m = models[r];
    std::vector<std::string> row{std::to_string(m.rank), join_names(m.indicator, names), m.indicator.to_string(),
                                 format_double(m.jpp), std::to_string(m.visits)};
    if (!refit_auc.empty()) row.push_back(cell(refit_auc[r]));
    csv::write_row(os, row);
  }
}

void write_inclusion_csv(std::ostream& os, const InclusionMatrix& matrix, const std::vector<std::string>& names) {
  std::vector<std::string> header{"rank", "jpp"};
  header.insert(header.end(), names.begin(), names.end());
  csv::write_row(os, header);
  for (Eigen::Index r = 0; r < matrix.bits.rows(); ++r) {
    std::vector<std::string> row{std::to_string(r + 1), format_double(matrix.jpp[static_cast<std::size_t>(r)])};
    for (Eigen::Index k = 0; k < matrix.bits.cols(); ++k) row.push_back(std::to_string(matrix.bits(r, k)));
    csv::write_row(os, row);
  }
}

void write_correlation_csv(std::ostream& os, const CorrelationReport& corr, const std::vector<std::string>& names) {
  std::vector<std::string> header{"factor"};
  header.insert(header.end(), names.begin(), names.end());
  csv::write_row(os, header);
  for (Eigen::Index a = 0; a < corr.r.rows(); ++a) {
    std::vector<std::string> row{names[static_cast<std::size_t>(a)]};
    for (Eigen::Index b = 0; b < corr.r.cols(); ++b) row.push_back(cell(corr.r(a, b)));
    csv::write_row(os, row);
  }
}

void write_leverage_csv(std::ostream& os, const LeverageReport& lev) {
  const bool grouped = !lev.groups.empty();
  std::vector<std::string> header{"observation", "leverage", "flagged"};
  if (grouped) header.emplace_back("group");
  csv::write_row(os, header);
  std::vector<bool> flagged(static_cast<std::size_t>(lev.h.size()), false);
  for (std::size_t i : lev.flagged) flagged[i] = true;
  for (Eigen::Index i = 0; i < lev.h.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), format_double(lev.h[i]), flagged[static_cast<std::size_t>(i)] ? "1" : "0"};
    if (grouped) row.push_back(lev.groups[static_cast<std::size_t>(i)]);
    csv::write_row(os, row);
  }
}

void write_roc_csv(std::ostream& os, const std::vector<RocPoint>& roc) {
  csv::write_row(os, {"fpr", "tpr"});
  for (const auto& p : roc) csv::write_row(os, {format_double(p.fpr), format_double(p.tpr)});
}

void write_nested_curve_csv(std::ostream& os, const std::vector<NestedAucPoint>& curve,
                            const std::vector<std::string>& names) {
  csv::write_row(os, {"model_size", "added_factor", "auc"});
  for (const auto& p : curve)
    csv::write_row(os, {std::to_string(p.size), names[p.factors.back()], format_double(p.auc)});
}

void write_sensitivity_csv(std::ostream& os, const SensitivityCurve& curve) {
  csv::write_row(os, {"factor", "w", "mpp", "fixed_w_other", "seed", "error"});
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    csv::write_row(os, {curve.factor, format_double(curve.grid[i]), cell(curve.mpp_at[i]), format_double(curve.fixed_w_other),
                        std::to_string(curve.seeds[i]), curve.errors[i]});
}

void write_screen_csv(std::ostream& os, const ScreenResult& screen) {
  csv::write_row(os, {"factor", "coefficient", "p_single", "retained", "converged", "unreliable", "warning"});
  for (const auto& r : screen.rows)
    csv::write_row(os, {r.name, r.converged ? format_double(r.coefficient) : "", r.converged ? format_double(r.p) : "",
                        r.retained ? "1" : "0", r.converged ? "1" : "0", r.unreliable ? "1" : "0", r.warning});
}

void write_ess_csv(std::ostream& os, const std::vector<EssRow>& rows) {
  csv::write_row(os, {"parameter", "ess", "degenerate"});
  for (const auto& r : rows) csv::write_row(os, {r.parameter, format_double(r.ess), r.degenerate ? "1" : "0"});
}

std::vector<ComparisonRow> build_comparison(const ScreenResult& screen, const StepwiseResult& stepwise,
                                            const std::vector<FactorSummary>& summaries) {
  std::vector<ComparisonRow> rows;
  for (std::size_t k = 0; k < summaries.size(); ++k) {
    ComparisonRow row;
    row.factor = summaries[k].name;
    row.mpp = summaries[k].mpp;
    row.beta_mean = summaries[k].beta_mean_given_included;
    row.beta_sd = summaries[k].beta_sd_given_included;
    for (const auto& s : screen.rows)
      if (s.factor == k && s.converged) row.p_single = s.p;
    for (std::size_t j = 0; j < stepwise.final_factors.size() && j < stepwise.final_pvalues.size(); ++j)
      if (stepwise.final_factors[j] == k) row.p_multi = stepwise.final_pvalues[j];
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  csv::write_row(os, {"factor", "p_single", "p_multi", "beta_mean_given_included", "beta_sd_given_included", "mpp"});
  for (const auto& r : rows)
    csv::write_row(os, {r.factor, cell(r.p_single), cell(r.p_multi), cell(r.beta_mean), cell(r.beta_sd), format_double(r.mpp)});
}

std::string prediction_report_json(const PredictionReport& r) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json doc;
  doc["method"] = r.method == PredictionMethod::bma ? "bma" : "refit-subset";
  doc["auc"] = num(r.auc);
  doc["pooled_auc"] = num(r.pooled_auc);
  doc["mean_fold_auc"] = num(r.mean_fold_auc);
  json folds = json::array();
  for (double a : r.per_fold_auc) folds.push_back(num(a));
  doc["per_fold_auc"] = folds;
  doc["fold_assignment"] = r.fold_assignment;
  doc["failed_folds"] = r.failed_folds;
  doc["warnings"] = r.warnings;
  json roc = json::array();
  for (const auto& p : r.roc) roc.push_back({p.fpr, p.tpr});
  doc["roc_points"] = roc;
  return doc.dump(2);
}

}  // namespace bvs::report
