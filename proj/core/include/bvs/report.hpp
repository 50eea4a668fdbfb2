#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bvs/baseline.hpp"
#include "bvs/dataset.hpp"
#include "bvs/diagnostics.hpp"
#include "bvs/prediction.hpp"
#include "bvs/sensitivity.hpp"
#include "bvs/summaries.hpp"

namespace bvs::report {

// Plot-ready CSV emitters. Missing values are empty cells; doubles use the
// shortest round-trip form.

void write_mpp_csv(std::ostream& os, const std::vector<FactorSummary>& summaries,
                   const std::vector<std::size_t>& rows = {});

// `refit_auc`, when given, holds one AUC per model row.
void write_jpp_csv(std::ostream& os, const std::vector<ModelSummary>& models,
                   const std::vector<std::string>& factor_names,
                   const std::vector<double>& refit_auc = {});

void write_inclusion_csv(std::ostream& os, const InclusionMatrix& matrix,
                         const std::vector<std::string>& factor_names);

void write_correlation_csv(std::ostream& os, const CorrelationReport& corr,
                           const std::vector<std::string>& factor_names);

void write_leverage_csv(std::ostream& os, const LeverageReport& lev);

void write_roc_csv(std::ostream& os, const std::vector<RocPoint>& roc);

void write_nested_curve_csv(std::ostream& os, const std::vector<NestedAucPoint>& curve,
                            const std::vector<std::string>& factor_names);

void write_sensitivity_csv(std::ostream& os, const SensitivityCurve& curve);

void write_screen_csv(std::ostream& os, const ScreenResult& screen);

struct EssRow {
  std::string parameter;
  double ess = 0.0;
  bool degenerate = false;
};
void write_ess_csv(std::ostream& os, const std::vector<EssRow>& rows);

// One row per factor joining the frequentist and Bayesian columns.
struct ComparisonRow {
  std::string factor;
  std::optional<double> p_single;
  std::optional<double> p_multi;
  std::optional<double> beta_mean;
  std::optional<double> beta_sd;
  double mpp = 0.0;
};

std::vector<ComparisonRow> build_comparison(const ScreenResult& screen, const StepwiseResult& stepwise,
                                            const std::vector<FactorSummary>& summaries);
void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);

std::string prediction_report_json(const PredictionReport& report);

}  // namespace bvs::report
