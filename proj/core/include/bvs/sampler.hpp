#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bvs/dataset.hpp"
#include "bvs/prior.hpp"
#include "bvs/rng.hpp"

namespace bvs {

// Proposal probabilities for the model move. Swaps fall back to a bit flip
// when the model is empty or full.
struct MoveMix {
  double add_delete = 0.5;
  double swap = 0.5;
};

struct ChainConfig {
  std::size_t iterations = 110'000;  // total sweeps, burn-in included
  std::size_t burn_in = 10'000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  MoveMix move_mix;
  std::size_t moves_per_sweep = 5;

  std::size_t kept_draws() const { return iterations > burn_in ? (iterations - burn_in) / thin : 0; }
  void validate() const;
};

enum class MoveType { add_delete, swap };

struct MoveCounts {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
};

struct ChainTelemetry {
  MoveCounts add_delete;
  MoveCounts swap;
  std::uint64_t rank_deficient_rejections = 0;
  double wall_seconds = 0.0;  // not part of the analytical output
  std::uint64_t seed = 0;
};

// Post-burn-in, thinned draws of (gamma, beta). Row d of `betas` is the
// length P + 1 coefficient vector of draw d (intercept first) with exact
// zeros wherever gammas[d] excludes a factor.
struct PosteriorDraws {
  std::vector<std::string> factor_names;
  PriorConfig prior;
  ChainConfig chain;
  std::vector<ModelIndicator> gammas;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> betas;
  ChainTelemetry telemetry;

  std::size_t size() const { return gammas.size(); }
  std::size_t num_factors() const { return factor_names.size(); }
};

// Conditional on the latent vector z the probit model is the linear model
// z ~ N(X_A beta_A, I), so beta integrates out in closed form. Caches the
// full Gram matrix once and X'z per latent update.
class LatentLinearModel {
 public:
  LatentLinearModel(const Dataset& ds, PriorConfig cfg);

  void set_latent(const Eigen::VectorXd& z);

  // log N(z | 0, I + X_A Sigma_A X_A'), evaluated in the (|A| + 1)-dimensional
  // precision form. Throws RankDeficientError from the slab prior.
  double log_marginal(const ModelIndicator& gamma) const;

  // beta_A ~ N(M^-1 X_A'z, M^-1) with M = Sigma_A^-1 + X_A'X_A; zeros elsewhere.
  Eigen::VectorXd draw_beta(const ModelIndicator& gamma, Rng& rng) const;

  const PriorConfig& prior() const { return cfg_; }
  std::size_t num_factors() const { return cfg_.w.size(); }

 private:
  struct Posterior {
    Eigen::LLT<Eigen::MatrixXd> chol;  // of M
    Eigen::VectorXd xtz;
    double log_det_covariance = 0.0;
  };
  Posterior posterior(const ModelIndicator& gamma) const;

  PriorConfig cfg_;
  std::size_t n_ = 0;
  Eigen::MatrixXd design_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd xtz_;
  double ztz_ = 0.0;
};

// z_i ~ N(x_i beta, 1) truncated to the side given by y_i.
Eigen::VectorXd gibbs_latent_update(const Dataset& ds, const Eigen::VectorXd& beta, Rng& rng);

double log_marginal_z(const Eigen::VectorXd& z, const ModelIndicator& gamma, const Dataset& ds,
                      const PriorConfig& cfg);

struct ModelProposal {
  ModelIndicator gamma;
  double log_proposal_ratio = 0.0;  // log q(gamma' -> gamma) - log q(gamma -> gamma')
  MoveType type = MoveType::add_delete;
};

ModelProposal propose_model_move(const ModelIndicator& gamma, const MoveMix& mix, Rng& rng);

struct ModelStep {
  ModelIndicator gamma;
  double log_target = 0.0;  // log_marginal + log_prior of the returned model
  MoveType type = MoveType::add_delete;
  bool accepted = false;
  bool rank_deficient = false;
};

// One Metropolis-Hastings move over gamma with beta integrated out.
// `current_log_target` must equal log_marginal + log_prior at `gamma`.
ModelStep mh_model_update(const LatentLinearModel& model, const ModelIndicator& gamma, double current_log_target,
                          const MoveMix& mix, Rng& rng);

// Accept/reject step for a given proposal.
ModelStep mh_step(const LatentLinearModel& model, const ModelIndicator& gamma, double current_log_target,
                  ModelProposal proposal, Rng& rng);

ModelIndicator mh_model_update(const Eigen::VectorXd& z, const ModelIndicator& gamma, const Dataset& ds,
                               const PriorConfig& cfg, Rng& rng);

Eigen::VectorXd conditional_beta_draw(const Eigen::VectorXd& z, const ModelIndicator& gamma, const Dataset& ds,
                                      const PriorConfig& cfg, Rng& rng);

// Starting model: the null model plus every factor with prior probability 1.
ModelIndicator initial_model(const PriorConfig& cfg);

PosteriorDraws run_chain(const Dataset& ds, const PriorConfig& cfg, const ChainConfig& chain);

}  // namespace bvs
