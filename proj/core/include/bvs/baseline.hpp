#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bvs/dataset.hpp"

namespace bvs {

struct GlmFit {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  // inverse observed information at the estimate
  double log_likelihood = 0.0;
  bool converged = false;
  bool separation = false;  // some |coefficient| exceeded the separation bound
  int iterations = 0;
  std::vector<double> log_likelihood_path;  // start value, then one entry per accepted step
};

// Relative slack used when comparing log-likelihoods between IRLS steps.
inline constexpr double kLogLikelihoodSlack = 1e-12;

struct IrlsOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 50;
  double separation_bound = 15.0;
  int max_step_halvings = 30;
};

// Maximum-likelihood logistic regression by Newton/IRLS with step halving.
// X includes the intercept column. Throws RankDeficientError for a
// rank-deficient design and DataError when only one class is present.
GlmFit fit_logistic_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const IrlsOptions& options = {});

double logistic_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);

struct WaldResult {
  Eigen::VectorXd z;
  Eigen::VectorXd p;
  bool unreliable = false;  // fit flagged separation
};

// Two-sided normal-approximation p-values. Throws NumericalError for a fit
// that neither converged nor flagged separation.
WaldResult wald_pvalues(const GlmFit& fit);

// Fit of intercept plus the listed factors.
GlmFit fit_factor_subset(const Dataset& ds, const std::vector<std::size_t>& factors, const IrlsOptions& options = {});

struct ScreenRow {
  std::size_t factor = 0;
  std::string name;
  double coefficient = 0.0;
  double p = 1.0;
  bool converged = false;
  bool unreliable = false;
  bool retained = false;
  std::string warning;
};

struct ScreenResult {
  double threshold = 0.003;
  std::vector<ScreenRow> rows;
  std::vector<std::size_t> retained;
};

// Intercept-plus-one-factor logistic fit per factor; keeps p < threshold.
ScreenResult single_factor_screen(const Dataset& ds, double threshold = 0.003);

enum class StepAction { add, drop };

struct StepDecision {
  StepAction action = StepAction::add;
  std::size_t factor = 0;
  double p = 0.0;
  std::vector<std::size_t> model_after;  // sorted factor indices
};

struct StepwiseResult {
  std::vector<std::size_t> final_factors;  // sorted
  GlmFit final_fit;                        // coefficients in final_factors order
  std::vector<double> final_pvalues;       // per final factor
  std::vector<StepDecision> trace;
  bool cycle_detected = false;
};

// Bidirectional stepwise selection on Wald p-values: add the candidate with
// the smallest p below enter_p (ties to the lower index), then drop the
// included factor with the largest p above exit_p, one at a time, refitting
// after each change. Stops when nothing changes or a state repeats.
StepwiseResult stepwise_select(const Dataset& ds, const std::vector<std::size_t>& candidates, double enter_p = 0.05,
                               double exit_p = 0.10);

// Re-executes a trace from the empty model and returns the resulting
// factor set (sorted).
std::vector<std::size_t> replay_stepwise(const std::vector<StepDecision>& trace);

std::string format_stepwise_trace(const StepwiseResult& result, const std::vector<std::string>& factor_names);

}  // namespace bvs
