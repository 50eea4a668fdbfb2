#include "bvs/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bvs/error.hpp"

namespace bvs {

std::vector<FactorSummary> mpp(const PosteriorDraws& draws) {
  if (draws.size() == 0) throw DataError("mpp: chain has no draws");
  const std::size_t p = draws.num_factors();
  std::vector<FactorSummary> out(p);
  // Welford accumulators: a constant conditional coefficient reproduces
  // itself exactly as the mean.
  std::vector<double> mean(p, 0.0), m2(p, 0.0);
  for (std::size_t d = 0; d < draws.size(); ++d) {
    for (std::size_t k = 0; k < p; ++k) {
      if (!draws.gammas[d].test(k)) continue;
      const double b = draws.betas(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k + 1));
      const auto c = ++out[k].inclusion_count;
      const double delta = b - mean[k];
      mean[k] += delta / static_cast<double>(c);
      m2[k] += delta * (b - mean[k]);
    }
  }
  for (std::size_t k = 0; k < p; ++k) {
    FactorSummary& s = out[k];
    s.name = draws.factor_names[k];
    s.mpp = static_cast<double>(s.inclusion_count) / static_cast<double>(draws.size());
    if (s.inclusion_count > 0) {
      s.beta_mean_given_included = mean[k];
      s.beta_sd_given_included =
          s.inclusion_count > 1 ? std::sqrt(m2[k] / static_cast<double>(s.inclusion_count - 1)) : 0.0;
    }
  }
  return out;
}

namespace {

std::map<ModelIndicator, std::size_t> visit_counts(const PosteriorDraws& draws) {
  std::map<ModelIndicator, std::size_t> counts;
  for (const auto& g : draws.gammas) ++counts[g];
  return counts;
}

}  // namespace

std::vector<ModelSummary> jpp(const PosteriorDraws& draws, std::size_t top_k) {
  if (draws.size() == 0) throw DataError("jpp: chain has no draws");
  std::vector<ModelSummary> models;
  for (const auto& [indicator, visits] : visit_counts(draws))
    models.push_back(ModelSummary{indicator, visits, static_cast<double>(visits) / static_cast<double>(draws.size()), 0});
  // The map iterates in lexicographic order; a stable sort keeps that as the
  // tie-break.
  std::stable_sort(models.begin(), models.end(),
                   [](const ModelSummary& a, const ModelSummary& b) { return a.visits > b.visits; });
  for (std::size_t r = 0; r < models.size(); ++r) models[r].rank = r + 1;
  if (top_k > 0 && models.size() > top_k) models.resize(top_k);
  return models;
}

double mpp_jpp_consistency(const PosteriorDraws& draws) {
  if (draws.size() == 0) throw DataError("mpp_jpp_consistency: chain has no draws");
  const std::size_t p = draws.num_factors();
  std::vector<std::size_t> direct(p, 0), via_models(p, 0);
  for (const auto& g : draws.gammas)
    for (std::size_t k = 0; k < p; ++k) direct[k] += g.test(k);
  for (const auto& [indicator, visits] : visit_counts(draws))
    for (std::size_t k = 0; k < p; ++k)
      if (indicator.test(k)) via_models[k] += visits;
  double worst = 0.0;
  const auto total = static_cast<double>(draws.size());
  for (std::size_t k = 0; k < p; ++k) {
    const double a = static_cast<double>(direct[k]) / total;
    const double b = static_cast<double>(via_models[k]) / total;
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

double total_jpp(const std::vector<ModelSummary>& models, std::size_t draw_count) {
  std::size_t visits = 0;
  for (const auto& m : models) visits += m.visits;
  return static_cast<double>(visits) / static_cast<double>(draw_count);
}

InclusionMatrix inclusion_matrix(const std::vector<ModelSummary>& models, std::size_t requested_rows) {
  if (requested_rows == 0) throw ConfigError("inclusion_matrix: need at least one row");
  if (models.empty()) throw DataError("inclusion_matrix: no models");
  InclusionMatrix out;
  const std::size_t rows = std::min(requested_rows, models.size());
  out.truncated = rows < requested_rows;
  const std::size_t p = models.front().indicator.num_factors();
  out.bits = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < p; ++k)
      out.bits(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = models[r].indicator.test(k);
    out.jpp.push_back(models[r].jpp);
  }
  return out;
}

std::vector<std::size_t> rank_by_mpp(const std::vector<FactorSummary>& summaries) {
  std::vector<std::size_t> order(summaries.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return summaries[a].mpp > summaries[b].mpp; });
  return order;
}

std::vector<std::size_t> table_rows_with_next_highest(const std::vector<FactorSummary>& summaries,
                                                      const std::vector<std::size_t>& always_show,
                                                      std::size_t extra) {
  std::vector<std::size_t> rows = always_show;
  std::size_t added = 0;
  for (std::size_t k : rank_by_mpp(summaries)) {
    if (added == extra) break;
    if (std::find(rows.begin(), rows.end(), k) != rows.end()) continue;
    rows.push_back(k);
    ++added;
  }
  return rows;
}

}  // namespace bvs
