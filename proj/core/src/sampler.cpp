#include "bvs/sampler.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "bvs/error.hpp"
#include "bvs/stats.hpp"
#include "bvs/truncated_normal.hpp"

namespace bvs {

void ChainConfig::validate() const {
  if (burn_in >= iterations) throw ConfigError("chain: burn-in must be smaller than the iteration count");
  if (thin < 1) throw ConfigError("chain: thin must be at least 1");
  if (!(move_mix.add_delete >= 0.0) || !(move_mix.swap >= 0.0))
    throw ConfigError("chain: move probabilities must be nonnegative");
  if (std::abs(move_mix.add_delete + move_mix.swap - 1.0) > 1e-12)
    throw ConfigError("chain: move probabilities must sum to 1");
  if (moves_per_sweep < 1) throw ConfigError("chain: need at least one model move per sweep");
}

// ---------------------------------------------------------------------------
// LatentLinearModel

LatentLinearModel::LatentLinearModel(const Dataset& ds, PriorConfig cfg)
    : cfg_(std::move(cfg)), n_(ds.n()), design_(ds.design()), gram_(design_.transpose() * design_) {
  if (cfg_.w.size() != ds.num_factors()) throw ConfigError("prior has " + std::to_string(cfg_.w.size()) +
                                                           " weights but data has " +
                                                           std::to_string(ds.num_factors()) + " factors");
  xtz_ = Eigen::VectorXd::Zero(gram_.rows());
}

void LatentLinearModel::set_latent(const Eigen::VectorXd& z) {
  if (static_cast<std::size_t>(z.size()) != n_) throw ConfigError("latent vector length does not match row count");
  xtz_.noalias() = design_.transpose() * z;
  ztz_ = z.squaredNorm();
}

namespace {

std::string describe_matrix(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  std::ostringstream os;
  const auto& ev = es.eigenvalues();
  os << "dimension " << m.rows() << ", eigenvalue range [" << ev.minCoeff() << ", " << ev.maxCoeff() << "]";
  if (ev.minCoeff() > 0) os << ", condition number " << ev.maxCoeff() / ev.minCoeff();
  return os.str();
}

}  // namespace

LatentLinearModel::Posterior LatentLinearModel::posterior(const ModelIndicator& gamma) const {
  const auto cols = active_columns(gamma);
  const Eigen::MatrixXd gram = gram_(cols, cols);
  SlabPrecision slab = slab_precision(gram, n_, cfg_);
  Eigen::MatrixXd m = slab.precision + gram;
  Posterior post{Eigen::LLT<Eigen::MatrixXd>(m), xtz_(cols), slab.log_det_covariance};
  if (post.chol.info() != Eigen::Success)
    throw NumericalError("posterior precision M is not positive definite: " + describe_matrix(m));
  return post;
}

double LatentLinearModel::log_marginal(const ModelIndicator& gamma) const {
  const Posterior post = posterior(gamma);
  const Eigen::MatrixXd& l = post.chol.matrixLLT();
  double log_det_m = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det_m += 2.0 * std::log(l(i, i));
  const Eigen::VectorXd half = post.chol.matrixL().solve(post.xtz);
  const double quad = ztz_ - half.squaredNorm();
  return -0.5 * (static_cast<double>(n_) * stats::kLog2Pi + post.log_det_covariance + log_det_m + quad);
}

Eigen::VectorXd LatentLinearModel::draw_beta(const ModelIndicator& gamma, Rng& rng) const {
  const auto cols = active_columns(gamma);
  const Posterior post = posterior(gamma);
  Eigen::VectorXd eps(static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = standard_normal(rng);
  // mean + L^-T eps has covariance (L L')^-1 = M^-1.
  const Eigen::VectorXd active = post.chol.solve(post.xtz) + post.chol.matrixU().solve(eps);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(gram_.rows());
  for (std::size_t j = 0; j < cols.size(); ++j) beta[cols[j]] = active[static_cast<Eigen::Index>(j)];
  return beta;
}

// ---------------------------------------------------------------------------
// Latent update

namespace {

Eigen::VectorXd latent_from_predictor(const Dataset& ds, const Eigen::VectorXd& eta, Rng& rng) {
  Eigen::VectorXd z(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const auto side = ds.outcome()[i] != 0.0 ? TruncationSide::positive : TruncationSide::negative;
    z[i] = sample_truncated_normal(eta[i], 1.0, side, rng);
  }
  return z;
}

}  // namespace

Eigen::VectorXd gibbs_latent_update(const Dataset& ds, const Eigen::VectorXd& beta, Rng& rng) {
  if (static_cast<std::size_t>(beta.size()) != ds.num_factors() + 1)
    throw ConfigError("gibbs_latent_update: beta length must be P + 1");
  if (!beta.allFinite()) throw NumericalError("gibbs_latent_update: non-finite coefficients");
  return latent_from_predictor(ds, ds.design() * beta, rng);
}

double log_marginal_z(const Eigen::VectorXd& z, const ModelIndicator& gamma, const Dataset& ds,
                      const PriorConfig& cfg) {
  LatentLinearModel model(ds, cfg);
  model.set_latent(z);
  return model.log_marginal(gamma);
}

// ---------------------------------------------------------------------------
// Model moves

namespace {

bool swap_available(const ModelIndicator& gamma) {
  return gamma.size() > 0 && gamma.size() < gamma.num_factors();
}

// Probability of proposing one particular single-bit flip from `gamma`.
double flip_probability(const ModelIndicator& gamma, const MoveMix& mix) {
  const double p_flip = mix.add_delete + (swap_available(gamma) ? 0.0 : mix.swap);
  return p_flip / static_cast<double>(gamma.num_factors());
}

std::size_t uniform_index(std::size_t count, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, count - 1);
  return dist(rng);
}

}  // namespace

ModelProposal propose_model_move(const ModelIndicator& gamma, const MoveMix& mix, Rng& rng) {
  const std::size_t p = gamma.num_factors();
  if (p == 0) throw ConfigError("propose_model_move: no candidate factors");
  const double total = mix.add_delete + mix.swap;
  const bool want_swap = uniform_open(rng) * total < mix.swap;

  if (want_swap && swap_available(gamma)) {
    const auto in = gamma.included();
    const auto out = gamma.excluded();
    const std::size_t drop = in[uniform_index(in.size(), rng)];
    const std::size_t add = out[uniform_index(out.size(), rng)];
    // |A1| is unchanged, so forward and reverse pick counts agree.
    return ModelProposal{gamma.with_swapped(drop, add), 0.0, MoveType::swap};
  }

  const std::size_t k = uniform_index(p, rng);
  ModelIndicator next = gamma.with_flipped(k);
  const double ratio = std::log(flip_probability(next, mix)) - std::log(flip_probability(gamma, mix));
  return ModelProposal{std::move(next), ratio, MoveType::add_delete};
}

ModelStep mh_model_update(const LatentLinearModel& model, const ModelIndicator& gamma, double current_log_target,
                          const MoveMix& mix, Rng& rng) {
  return mh_step(model, gamma, current_log_target, propose_model_move(gamma, mix, rng), rng);
}

ModelStep mh_step(const LatentLinearModel& model, const ModelIndicator& gamma, double current_log_target,
                  ModelProposal prop, Rng& rng) {
  ModelStep step{gamma, current_log_target, prop.type, false, false};

  // The uniform is drawn unconditionally so the random stream does not
  // depend on which branch rejects.
  const double log_u = std::log(uniform_open(rng));

  if (prop.gamma == gamma) {
    step.accepted = true;
    return step;
  }
  const double log_prior = log_prior_model(prop.gamma, model.prior());
  if (log_prior == -std::numeric_limits<double>::infinity()) return step;

  double log_marginal = 0.0;
  try {
    log_marginal = model.log_marginal(prop.gamma);
  } catch (const RankDeficientError&) {
    step.rank_deficient = true;
    return step;
  }
  const double proposed = log_marginal + log_prior;
  const double log_alpha = proposed - current_log_target + prop.log_proposal_ratio;
  if (!std::isnan(log_alpha) && log_u < log_alpha) {
    step.gamma = std::move(prop.gamma);
    step.log_target = proposed;
    step.accepted = true;
  }
  return step;
}

ModelIndicator mh_model_update(const Eigen::VectorXd& z, const ModelIndicator& gamma, const Dataset& ds,
                               const PriorConfig& cfg, Rng& rng) {
  LatentLinearModel model(ds, cfg);
  model.set_latent(z);
  const double current = model.log_marginal(gamma) + log_prior_model(gamma, cfg);
  return mh_model_update(model, gamma, current, MoveMix{}, rng).gamma;
}

Eigen::VectorXd conditional_beta_draw(const Eigen::VectorXd& z, const ModelIndicator& gamma, const Dataset& ds,
                                      const PriorConfig& cfg, Rng& rng) {
  LatentLinearModel model(ds, cfg);
  model.set_latent(z);
  return model.draw_beta(gamma, rng);
}

// ---------------------------------------------------------------------------
// Chain driver

ModelIndicator initial_model(const PriorConfig& cfg) {
  std::vector<std::uint8_t> bits(cfg.w.size(), 0);
  for (std::size_t k = 0; k < cfg.w.size(); ++k) bits[k] = cfg.w[k] == 1.0;
  return ModelIndicator(std::move(bits));
}

namespace {

[[noreturn]] void abort_chain(std::size_t iteration, const ModelIndicator& gamma, const Eigen::VectorXd& beta,
                              const std::string& what) {
  std::ostringstream os;
  os << "chain aborted at iteration " << iteration << ": " << what << "; gamma=" << gamma.to_string() << " beta=[";
  for (Eigen::Index i = 0; i < beta.size(); ++i) os << (i ? " " : "") << beta[i];
  os << "]";
  throw NumericalError(os.str());
}

}  // namespace

PosteriorDraws run_chain(const Dataset& ds, const PriorConfig& cfg, const ChainConfig& chain) {
  cfg.validate();
  chain.validate();
  if (cfg.w.size() != ds.num_factors()) throw ConfigError("prior length does not match factor count");

  const auto started = std::chrono::steady_clock::now();
  Rng rng(chain.seed);
  LatentLinearModel model(ds, cfg);

  PosteriorDraws out;
  out.factor_names = ds.factor_names();
  out.prior = cfg;
  out.chain = chain;
  out.telemetry.seed = chain.seed;
  const std::size_t kept = chain.kept_draws();
  out.gammas.reserve(kept);
  out.betas.resize(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(ds.num_factors() + 1));

  ModelIndicator gamma = initial_model(cfg);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ds.num_factors() + 1));
  const bool can_move = ds.num_factors() > 0;

  for (std::size_t it = 0; it < chain.iterations; ++it) {
    const auto cols = active_columns(gamma);
    const Eigen::VectorXd eta = ds.design()(Eigen::all, cols) * beta(cols);
    model.set_latent(latent_from_predictor(ds, eta, rng));

    double target = 0.0;
    try {
      target = model.log_marginal(gamma) + log_prior_model(gamma, cfg);
    } catch (const NumericalError& e) {
      abort_chain(it, gamma, beta, e.what());
    }
    if (!std::isfinite(target)) abort_chain(it, gamma, beta, "non-finite log-likelihood");

    if (can_move) {
      for (std::size_t m = 0; m < chain.moves_per_sweep; ++m) {
        ModelStep step = mh_model_update(model, gamma, target, chain.move_mix, rng);
        MoveCounts& counts = step.type == MoveType::swap ? out.telemetry.swap : out.telemetry.add_delete;
        ++counts.proposed;
        if (step.accepted) ++counts.accepted;
        if (step.rank_deficient) ++out.telemetry.rank_deficient_rejections;
        gamma = std::move(step.gamma);
        target = step.log_target;
      }
    }

    beta = model.draw_beta(gamma, rng);
    if (!beta.allFinite()) abort_chain(it, gamma, beta, "non-finite coefficient draw");

    if (it >= chain.burn_in && (it - chain.burn_in + 1) % chain.thin == 0 && out.gammas.size() < kept) {
      out.betas.row(static_cast<Eigen::Index>(out.gammas.size())) = beta.transpose();
      out.gammas.push_back(gamma);
    }
  }

  out.telemetry.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace bvs
