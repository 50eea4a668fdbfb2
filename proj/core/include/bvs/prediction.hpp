#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bvs/dataset.hpp"
#include "bvs/prior.hpp"
#include "bvs/sampler.hpp"

namespace bvs {

// Model-averaged predictive probability (1/M) sum_m Phi(x* beta^[m]).
// `factor_row` holds the P standardized factor values (no intercept).
double posterior_predictive(const PosteriorDraws& draws, const Eigen::VectorXd& factor_row);

// Same for every row of a design matrix that includes the intercept column.
Eigen::VectorXd posterior_predictive_design(const PosteriorDraws& draws, const Eigen::MatrixXd& design);

// Mann-Whitney AUC with midrank ties: (concordant + ties / 2) / (n_pos n_neg).
// Throws DataError when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Empirical ROC from (0,0) to (1,1); tied scores form one diagonal segment.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
double trapezoid_area(std::span<const RocPoint> points);

std::vector<int> labels_of(const Dataset& ds);

// Stratified fold ids in [0, k): positives and negatives are shuffled
// separately and dealt round-robin, positives first, with one running
// counter so per-fold class counts differ by at most one.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

enum class PredictionMethod { bma, refit_subset };
enum class AucPooling { pooled, fold_mean };

struct CvOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  AucPooling pooling = AucPooling::pooled;
  std::size_t jobs = 1;
};

struct PredictionReport {
  PredictionMethod method = PredictionMethod::refit_subset;
  double auc = 0.5;              // headline value per CvOptions::pooling
  double pooled_auc = 0.5;
  double mean_fold_auc = 0.5;    // over folds with both classes held out
  std::vector<RocPoint> roc;     // from pooled out-of-fold scores
  std::vector<double> per_fold_auc;  // NaN where undefined or failed
  std::vector<std::size_t> fold_assignment;
  std::vector<double> scores;    // out-of-fold predicted probabilities; NaN for failed folds
  std::vector<std::size_t> failed_folds;
  std::vector<std::string> warnings;
};

// k-fold cross-validated AUC of a maximum-likelihood logistic refit on the
// intercept plus the factors in `subset`.
PredictionReport kfold_refit_auc(const Dataset& ds, const ModelIndicator& subset, const CvOptions& options);

// k-fold cross-validated AUC of model-averaged probit predictions: the
// sampler runs on each training split and scores the held-out rows. Fold f
// uses chain seed derive_seed(chain.seed, f).
PredictionReport bma_cv_auc(const Dataset& ds, const PriorConfig& cfg, const ChainConfig& chain,
                            const CvOptions& options);

struct NestedAucPoint {
  std::size_t size = 0;
  double auc = 0.5;
  std::vector<std::size_t> factors;
};

// AUC of refits on the top-s factors of `ranking` for s = 1..P, sharing one
// fold assignment.
std::vector<NestedAucPoint> nested_auc_curve(const Dataset& ds, const std::vector<std::size_t>& ranking,
                                             const CvOptions& options);

ModelIndicator indicator_of(std::size_t num_factors, const std::vector<std::size_t>& factors);

}  // namespace bvs
