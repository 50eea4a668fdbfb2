#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bvs {

enum class ColumnRole { continuous, binary, categorical, ignore };
enum class MissingPolicy { complete_case, impute };

struct ColumnEncoding {
  ColumnRole role = ColumnRole::continuous;
  // Reference level for binary/categorical columns. Defaults to the first
  // observed level.
  std::optional<std::string> reference;
};

// Raw labels mapped onto the outcome. Without them the outcome column must
// already hold 0/1.
struct OutcomeLabels {
  std::string positive;
  std::string negative;
};

struct EncodingSpec {
  std::map<std::string, ColumnEncoding> columns;
  MissingPolicy missing = MissingPolicy::complete_case;
  std::optional<OutcomeLabels> outcome_labels;
};

// JSON document: {"columns": {"age": "continuous",
//                             "centre": {"role": "categorical", "reference": "B"}},
//                 "missing": "complete-case" | "impute",
//                 "outcome_labels": {"positive": "NEET", "negative": "EET"}}
EncodingSpec parse_encoding_spec(std::string_view json_text);
EncodingSpec load_encoding_spec(const std::filesystem::path& path);

enum class FactorKind { continuous, binary, dummy };

struct FactorInfo {
  std::string name;
  FactorKind kind = FactorKind::continuous;
  std::string source_column;
  std::string level;  // empty unless kind is dummy or relabelled binary
};

struct CategoricalExpansion {
  std::string source_column;
  std::string reference;
  std::vector<std::string> levels;  // first-observed order
  std::vector<std::string> dummy_names;
};

struct Standardization {
  std::string factor;
  double mean = 0.0;
  double sd = 1.0;
};

struct EncodingLog {
  MissingPolicy missing_policy = MissingPolicy::complete_case;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::size_t cells_imputed = 0;
  std::vector<CategoricalExpansion> expansions;
  std::vector<Standardization> standardization;
  std::vector<std::string> warnings;

  const Standardization* standardization_for(std::string_view factor) const;
};

// Binary-outcome regression data. Design column 0 is the intercept; column
// k + 1 holds factor k. Immutable once constructed; the constructor checks
// every structural invariant and throws DataError on violation.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd design, Eigen::VectorXd outcome, std::vector<FactorInfo> factors,
          EncodingLog log = {});

  std::size_t n() const { return static_cast<std::size_t>(design_.rows()); }
  std::size_t num_factors() const { return factors_.size(); }

  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::VectorXd& outcome() const { return outcome_; }
  const std::vector<FactorInfo>& factors() const { return factors_; }
  std::vector<std::string> factor_names() const;
  const EncodingLog& encoding_log() const { return log_; }

  std::optional<std::size_t> factor_index(std::string_view name) const;
  std::size_t require_factor(std::string_view name) const;

  bool outcome_at(std::size_t i) const { return outcome_[static_cast<Eigen::Index>(i)] != 0.0; }
  std::size_t positives() const;

  Dataset subset_rows(std::span<const std::size_t> rows) const;
  // Keeps the listed factors (in the given order) plus the intercept.
  Dataset select_factors(std::span<const std::size_t> factors) const;

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd outcome_;
  std::vector<FactorInfo> factors_;
  EncodingLog log_;
};

// Builds a Dataset from an n x P factor matrix (no intercept column). All
// factors are tagged continuous. Names default to x1..xP.
Dataset make_dataset(const Eigen::MatrixXd& factors, const Eigen::VectorXd& outcome,
                     std::vector<std::string> names = {});

Dataset load_csv(const std::filesystem::path& path, const EncodingSpec& spec, std::string_view outcome_column);
Dataset load_csv_text(std::string_view text, const EncodingSpec& spec, std::string_view outcome_column);

// Z-scores continuous factors with the (n - 1) standard deviation and records
// the parameters. Binary and dummy factors are untouched.
Dataset standardize(const Dataset& ds);

// Re-applies recorded standardization parameters to raw (unstandardized)
// data with the same factor layout.
Dataset apply_standardization(const Dataset& raw, const EncodingLog& log);
Eigen::VectorXd standardize_row(const Eigen::VectorXd& raw_design_row, const Dataset& trained);

struct CorrelationReport {
  Eigen::MatrixXd r;  // P x P; NaN where undefined
  std::vector<std::string> undefined_factors;
  double threshold = 0.08;
  std::size_t pairs_counted = 0;
  std::size_t pairs_above = 0;
  double fraction_above = 0.0;
};

CorrelationReport correlation_matrix(const Dataset& ds, double threshold = 0.08);

std::string dataset_to_json(const Dataset& ds);

}  // namespace bvs
