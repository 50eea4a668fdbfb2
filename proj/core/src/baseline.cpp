#include "bvs/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "bvs/error.hpp"
#include "bvs/stats.hpp"

namespace bvs {

namespace {

// log(1 + exp(eta)) without overflow.
double softplus(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double logistic(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace

double logistic_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return ll;
}

GlmFit fit_logistic_irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const IrlsOptions& options) {
  if (x.rows() != y.size()) throw DataError("fit_logistic_irls: X and y row counts differ");
  const double positives = y.sum();
  if (positives == 0.0 || positives == static_cast<double>(y.size()))
    throw DataError("fit_logistic_irls: outcome has a single class");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) throw RankDeficientError("fit_logistic_irls: design is rank deficient");

  const Eigen::Index p = x.cols();
  GlmFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(p);
  double ll = logistic_log_likelihood(x, y, fit.coefficients);
  fit.log_likelihood_path.push_back(ll);

  Eigen::VectorXd prob(x.rows());
  Eigen::VectorXd weight(x.rows());
  Eigen::LDLT<Eigen::MatrixXd> info;

  auto refresh = [&](const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = x * beta;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      prob[i] = logistic(eta[i]);
      weight[i] = prob[i] * (1.0 - prob[i]);
    }
    info.compute(x.transpose() * weight.asDiagonal() * x);
  };

  refresh(fit.coefficients);
  for (fit.iterations = 0; fit.iterations < options.max_iterations; ++fit.iterations) {
    const Eigen::VectorXd grad = x.transpose() * (y - prob);
    if (grad.norm() < options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    if (info.info() != Eigen::Success) break;
    Eigen::VectorXd step = info.solve(grad);
    Eigen::VectorXd next = fit.coefficients + step;
    double next_ll = logistic_log_likelihood(x, y, next);
    // Near the optimum a Newton step changes ll by less than its rounding
    // error, so compare with a small relative slack.
    const double slack = kLogLikelihoodSlack * (1.0 + std::abs(ll));
    int halvings = 0;
    while (!(next_ll >= ll - slack) && halvings < options.max_step_halvings) {
      step *= 0.5;
      next = fit.coefficients + step;
      next_ll = logistic_log_likelihood(x, y, next);
      ++halvings;
    }
    if (!(next_ll >= ll - slack)) break;
    fit.coefficients = next;
    ll = next_ll;
    fit.log_likelihood_path.push_back(ll);
    refresh(fit.coefficients);
  }
  if (!fit.converged) {
    // The loop may have exhausted its budget right after a final update.
    const Eigen::VectorXd grad = x.transpose() * (y - prob);
    fit.converged = grad.norm() < options.gradient_tolerance;
  }

  fit.log_likelihood = ll;
  fit.separation = fit.coefficients.cwiseAbs().maxCoeff() > options.separation_bound;
  if (info.info() == Eigen::Success) {
    fit.covariance = info.solve(Eigen::MatrixXd::Identity(p, p));
    fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose());
  } else {
    fit.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    fit.converged = false;
  }
  return fit;
}

WaldResult wald_pvalues(const GlmFit& fit) {
  if (!fit.converged && !fit.separation) throw NumericalError("wald_pvalues: fit did not converge");
  WaldResult out;
  out.unreliable = fit.separation;
  const Eigen::Index p = fit.coefficients.size();
  out.z.resize(p);
  out.p.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double se = std::sqrt(fit.covariance(j, j));
    out.z[j] = fit.coefficients[j] == 0.0 ? 0.0 : fit.coefficients[j] / se;
    out.p[j] = stats::two_sided_normal_pvalue(out.z[j]);
  }
  return out;
}

GlmFit fit_factor_subset(const Dataset& ds, const std::vector<std::size_t>& factors, const IrlsOptions& options) {
  std::vector<Eigen::Index> cols{0};
  for (std::size_t k : factors) {
    if (k >= ds.num_factors()) throw ConfigError("fit_factor_subset: factor index out of range");
    cols.push_back(static_cast<Eigen::Index>(k + 1));
  }
  return fit_logistic_irls(ds.design()(Eigen::all, cols), ds.outcome(), options);
}

// ---------------------------------------------------------------------------
// Single-factor screen

ScreenResult single_factor_screen(const Dataset& ds, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("screen threshold must lie in [0, 1]");
  ScreenResult result;
  result.threshold = threshold;
  for (std::size_t k = 0; k < ds.num_factors(); ++k) {
    ScreenRow row;
    row.factor = k;
    row.name = ds.factors()[k].name;
    try {
      const GlmFit fit = fit_factor_subset(ds, {k});
      row.converged = fit.converged;
      if (!fit.converged) {
        row.warning = fit.separation ? "separation; fit did not converge" : "fit did not converge";
      } else {
        const WaldResult wald = wald_pvalues(fit);
        row.coefficient = fit.coefficients[1];
        row.p = wald.p[1];
        row.unreliable = wald.unreliable;
        if (wald.unreliable) row.warning = "quasi-separation; p-value unreliable";
        row.retained = row.p < threshold;
      }
    } catch (const Error& e) {
      row.warning = e.what();
    }
    if (row.retained) result.retained.push_back(k);
    result.rows.push_back(std::move(row));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Stepwise

namespace {

struct SubsetFit {
  bool ok = false;
  GlmFit fit;
  WaldResult wald;
};

SubsetFit try_fit(const Dataset& ds, const std::vector<std::size_t>& factors) {
  SubsetFit out;
  try {
    out.fit = fit_factor_subset(ds, factors);
    if (!out.fit.converged) return out;
    out.wald = wald_pvalues(out.fit);
    out.ok = true;
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

StepwiseResult stepwise_select(const Dataset& ds, const std::vector<std::size_t>& candidates, double enter_p,
                               double exit_p) {
  if (candidates.empty()) throw ConfigError("stepwise_select: no candidate factors");
  StepwiseResult result;
  std::vector<std::size_t> model;
  std::set<std::vector<std::size_t>> seen{model};
  bool any_fit_succeeded = false;

  auto record = [&](StepAction action, std::size_t factor, double p) {
    result.trace.push_back(StepDecision{action, factor, p, model});
    if (!seen.insert(model).second) {
      result.cycle_detected = true;
      return false;
    }
    return true;
  };

  const std::vector<std::size_t> pool = sorted(candidates);
  for (;;) {
    bool changed = false;

    // Forward step.
    std::size_t best = 0;
    double best_p = 2.0;
    for (std::size_t c : pool) {
      if (std::find(model.begin(), model.end(), c) != model.end()) continue;
      std::vector<std::size_t> trial = model;
      trial.push_back(c);
      trial = sorted(trial);
      const SubsetFit f = try_fit(ds, trial);
      if (!f.ok) continue;
      any_fit_succeeded = true;
      const auto pos = std::find(trial.begin(), trial.end(), c) - trial.begin();
      const double p = f.wald.p[pos + 1];
      if (p < best_p) {
        best_p = p;
        best = c;
      }
    }
    if (!any_fit_succeeded && model.empty()) throw NumericalError("stepwise_select: every candidate fit failed");
    if (best_p < enter_p) {
      model.push_back(best);
      model = sorted(model);
      changed = true;
      if (!record(StepAction::add, best, best_p)) break;
    }

    // Backward steps.
    bool cycled = false;
    while (!model.empty()) {
      const SubsetFit f = try_fit(ds, model);
      if (!f.ok) break;
      std::size_t worst = model.size();
      double worst_p = -1.0;
      for (std::size_t j = 0; j < model.size(); ++j) {
        const double p = f.wald.p[static_cast<Eigen::Index>(j + 1)];
        if (p > worst_p) {
          worst_p = p;
          worst = j;
        }
      }
      if (!(worst_p > exit_p)) break;
      const std::size_t dropped = model[worst];
      model.erase(model.begin() + static_cast<std::ptrdiff_t>(worst));
      changed = true;
      if (!record(StepAction::drop, dropped, worst_p)) {
        cycled = true;
        break;
      }
    }
    if (cycled || !changed) break;
  }

  result.final_factors = model;
  if (!model.empty()) {
    const SubsetFit f = try_fit(ds, model);
    result.final_fit = f.fit;
    if (f.ok)
      for (std::size_t j = 0; j < model.size(); ++j) result.final_pvalues.push_back(f.wald.p[static_cast<Eigen::Index>(j + 1)]);
  } else {
    const SubsetFit f = try_fit(ds, {});
    result.final_fit = f.fit;
  }
  return result;
}

std::vector<std::size_t> replay_stepwise(const std::vector<StepDecision>& trace) {
  std::vector<std::size_t> model;
  for (const auto& d : trace) {
    if (d.action == StepAction::add) {
      model.push_back(d.factor);
    } else {
      const auto it = std::find(model.begin(), model.end(), d.factor);
      if (it == model.end()) throw DataError("replay_stepwise: drop of a factor that is not in the model");
      model.erase(it);
    }
  }
  return sorted(model);
}

std::string format_stepwise_trace(const StepwiseResult& result, const std::vector<std::string>& factor_names) {
  std::ostringstream os;
  os << std::setprecision(6);
  std::size_t step = 1;
  for (const auto& d : result.trace) {
    os << "step " << step++ << ": " << (d.action == StepAction::add ? "add " : "drop ") << factor_names[d.factor]
       << " (p=" << d.p << ") -> {";
    for (std::size_t j = 0; j < d.model_after.size(); ++j) os << (j ? ", " : "") << factor_names[d.model_after[j]];
    os << "}\n";
  }
  if (result.cycle_detected) os << "stopped: repeated state\n";
  os << "final: {";
  for (std::size_t j = 0; j < result.final_factors.size(); ++j)
    os << (j ? ", " : "") << factor_names[result.final_factors[j]];
  os << "}\n";
  return os.str();
}

}  // namespace bvs
