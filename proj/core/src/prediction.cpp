#include "bvs/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bvs/baseline.hpp"
#include "bvs/error.hpp"
#include "bvs/parallel.hpp"
#include "bvs/rng.hpp"
#include "bvs/stats.hpp"

namespace bvs {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Posterior predictive

Eigen::VectorXd posterior_predictive_design(const PosteriorDraws& draws, const Eigen::MatrixXd& design) {
  if (draws.size() == 0) throw DataError("posterior_predictive: chain has no draws");
  if (static_cast<std::size_t>(design.cols()) != draws.num_factors() + 1)
    throw DataError("posterior_predictive: row has " + std::to_string(design.cols() - 1) + " factors, chain has " +
                    std::to_string(draws.num_factors()));
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(design.rows());
  // Blocks of draws keep the linear-predictor buffer small.
  constexpr Eigen::Index kBlock = 4096;
  const auto total = static_cast<Eigen::Index>(draws.size());
  for (Eigen::Index start = 0; start < total; start += kBlock) {
    const Eigen::Index len = std::min(kBlock, total - start);
    const Eigen::MatrixXd eta = design * draws.betas.middleRows(start, len).transpose();
    for (Eigen::Index j = 0; j < eta.cols(); ++j)
      for (Eigen::Index i = 0; i < eta.rows(); ++i) sum[i] += stats::normal_cdf(eta(i, j));
  }
  Eigen::VectorXd out = sum / static_cast<double>(total);
  return out.cwiseMax(0.0).cwiseMin(1.0);
}

double posterior_predictive(const PosteriorDraws& draws, const Eigen::VectorXd& factor_row) {
  if (static_cast<std::size_t>(factor_row.size()) != draws.num_factors())
    throw DataError("posterior_predictive: x* has " + std::to_string(factor_row.size()) + " entries, expected " +
                    std::to_string(draws.num_factors()));
  Eigen::MatrixXd design(1, factor_row.size() + 1);
  design(0, 0) = 1.0;
  design.rightCols(factor_row.size()) = factor_row.transpose();
  return posterior_predictive_design(draws, design)[0];
}

// ---------------------------------------------------------------------------
// AUC and ROC

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share the midrank (i + 1 + j) / 2.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] != 0) {
        rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw DataError("auc: labels contain a single class");
  const double np = static_cast<double>(positives);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("roc_curve: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t total_pos = 0;
  for (int l : labels) total_pos += l != 0;
  const std::size_t total_neg = n - total_pos;
  if (total_pos == 0 || total_neg == 0) throw DataError("roc_curve: labels contain a single class");

  std::vector<RocPoint> points{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] != 0) ++tp;
      else ++fp;
      ++j;
    }
    points.push_back({static_cast<double>(fp) / static_cast<double>(total_neg),
                      static_cast<double>(tp) / static_cast<double>(total_pos)});
    i = j;
  }
  return points;
}

double trapezoid_area(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  return area;
}

std::vector<int> labels_of(const Dataset& ds) {
  std::vector<int> labels(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) labels[i] = ds.outcome_at(i) ? 1 : 0;
  return labels;
}

// ---------------------------------------------------------------------------
// Folds

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (k > labels.size()) throw ConfigError("more folds than rows");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] != 0 ? pos : neg).push_back(i);
  Rng rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::size_t> folds(labels.size());
  std::size_t counter = 0;
  for (std::size_t i : pos) folds[i] = counter++ % k;
  for (std::size_t i : neg) folds[i] = counter++ % k;
  return folds;
}

namespace {

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<FoldSplit> split_folds(const Dataset& ds, const std::vector<std::size_t>& assignment, std::size_t k) {
  std::vector<FoldSplit> splits(k);
  for (std::size_t i = 0; i < assignment.size(); ++i)
    for (std::size_t f = 0; f < k; ++f) (assignment[i] == f ? splits[f].test : splits[f].train).push_back(i);
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t pos = 0;
    for (std::size_t i : splits[f].train) pos += ds.outcome_at(i);
    if (pos == 0 || pos == splits[f].train.size())
      throw DataError("fold " + std::to_string(f) + ": training split contains a single class");
  }
  return splits;
}

// Assembles AUC summaries from per-row out-of-fold scores.
void finish_report(PredictionReport& report, const std::vector<int>& labels, std::size_t k,
                   const CvOptions& options) {
  std::vector<double> pooled_scores;
  std::vector<int> pooled_labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::isnan(report.scores[i])) continue;
    pooled_scores.push_back(report.scores[i]);
    pooled_labels.push_back(labels[i]);
  }
  report.pooled_auc = auc(pooled_scores, pooled_labels);
  report.roc = roc_curve(pooled_scores, pooled_labels);

  report.per_fold_auc.assign(k, kNaN);
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t f = 0; f < k; ++f) {
    if (std::find(report.failed_folds.begin(), report.failed_folds.end(), f) != report.failed_folds.end()) continue;
    std::vector<double> s;
    std::vector<int> l;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (report.fold_assignment[i] != f) continue;
      s.push_back(report.scores[i]);
      l.push_back(labels[i]);
    }
    const bool both = std::find(l.begin(), l.end(), 0) != l.end() && std::find(l.begin(), l.end(), 1) != l.end();
    if (!both) continue;
    report.per_fold_auc[f] = auc(s, l);
    sum += report.per_fold_auc[f];
    ++defined;
  }
  report.mean_fold_auc = defined ? sum / static_cast<double>(defined) : kNaN;
  report.auc = options.pooling == AucPooling::pooled ? report.pooled_auc : report.mean_fold_auc;
}

}  // namespace

ModelIndicator indicator_of(std::size_t num_factors, const std::vector<std::size_t>& factors) {
  std::vector<std::uint8_t> bits(num_factors, 0);
  for (std::size_t k : factors) {
    if (k >= num_factors) throw ConfigError("factor index out of range");
    bits[k] = 1;
  }
  return ModelIndicator(std::move(bits));
}

PredictionReport kfold_refit_auc(const Dataset& ds, const ModelIndicator& subset, const CvOptions& options) {
  if (subset.num_factors() != ds.num_factors()) throw ConfigError("kfold_refit_auc: subset length mismatch");
  const std::vector<int> labels = labels_of(ds);
  const std::size_t k = options.folds;

  PredictionReport report;
  report.method = PredictionMethod::refit_subset;
  report.fold_assignment = stratified_folds(labels, k, options.seed);
  report.scores.assign(ds.n(), kNaN);
  const auto splits = split_folds(ds, report.fold_assignment, k);
  const auto cols = active_columns(subset);

  std::vector<std::string> fold_warning(k);
  parallel_for(k, options.jobs, [&](std::size_t f) {
    const Dataset train = ds.subset_rows(splits[f].train);
    GlmFit fit;
    try {
      fit = fit_logistic_irls(train.design()(Eigen::all, cols), train.outcome());
    } catch (const Error& e) {
      fold_warning[f] = e.what();
      return;
    }
    if (!fit.converged) {
      fold_warning[f] = fit.separation ? "separation; fit did not converge" : "fit did not converge";
      return;
    }
    for (std::size_t i : splits[f].test) {
      const double eta = ds.design()(static_cast<Eigen::Index>(i), cols).dot(fit.coefficients);
      report.scores[i] = 1.0 / (1.0 + std::exp(-eta));
    }
  });
  for (std::size_t f = 0; f < k; ++f) {
    if (fold_warning[f].empty()) continue;
    report.failed_folds.push_back(f);
    report.warnings.push_back("fold " + std::to_string(f) + ": " + fold_warning[f]);
  }
  if (report.failed_folds.size() == k) throw NumericalError("kfold_refit_auc: every fold fit failed");
  finish_report(report, labels, k, options);
  return report;
}

PredictionReport bma_cv_auc(const Dataset& ds, const PriorConfig& cfg, const ChainConfig& chain,
                            const CvOptions& options) {
  const std::vector<int> labels = labels_of(ds);
  const std::size_t k = options.folds;

  PredictionReport report;
  report.method = PredictionMethod::bma;
  report.fold_assignment = stratified_folds(labels, k, options.seed);
  report.scores.assign(ds.n(), kNaN);
  const auto splits = split_folds(ds, report.fold_assignment, k);

  parallel_for(k, options.jobs, [&](std::size_t f) {
    const Dataset train = ds.subset_rows(splits[f].train);
    ChainConfig fold_chain = chain;
    fold_chain.seed = derive_seed(chain.seed, f);
    const PosteriorDraws draws = run_chain(train, cfg, fold_chain);
    const Dataset test = ds.subset_rows(splits[f].test);
    const Eigen::VectorXd probs = posterior_predictive_design(draws, test.design());
    for (std::size_t t = 0; t < splits[f].test.size(); ++t)
      report.scores[splits[f].test[t]] = probs[static_cast<Eigen::Index>(t)];
  });
  finish_report(report, labels, k, options);
  return report;
}

std::vector<NestedAucPoint> nested_auc_curve(const Dataset& ds, const std::vector<std::size_t>& ranking,
                                             const CvOptions& options) {
  const std::size_t p = ds.num_factors();
  {
    std::vector<std::size_t> check = ranking;
    std::sort(check.begin(), check.end());
    if (check.size() != p || std::adjacent_find(check.begin(), check.end()) != check.end() ||
        (p > 0 && check.back() >= p))
      throw ConfigError("nested_auc_curve: ranking must list every factor exactly once");
  }
  std::vector<NestedAucPoint> curve(p);
  CvOptions inner = options;
  inner.jobs = 1;
  parallel_for(p, options.jobs, [&](std::size_t s) {
    std::vector<std::size_t> top(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(s + 1));
    const PredictionReport r = kfold_refit_auc(ds, indicator_of(p, top), inner);
    curve[s] = NestedAucPoint{s + 1, r.auc, std::move(top)};
  });
  return curve;
}

}  // namespace bvs
