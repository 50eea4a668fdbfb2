#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bvs/prior.hpp"
#include "bvs/sampler.hpp"

namespace bvs {

struct FactorSummary {
  std::string name;
  double mpp = 0.0;
  std::size_t inclusion_count = 0;
  // Posterior mean and sd of beta_k over draws with gamma_k = 1. Unset when
  // the factor was never included.
  std::optional<double> beta_mean_given_included;
  std::optional<double> beta_sd_given_included;
};

struct ModelSummary {
  ModelIndicator indicator;
  std::size_t visits = 0;
  double jpp = 0.0;
  std::size_t rank = 0;  // 1-based
};

std::vector<FactorSummary> mpp(const PosteriorDraws& draws);

// Visit-frequency estimates of Pr(gamma | y, X), ranked by descending JPP
// with ties broken lexicographically on the bit pattern. top_k = 0 keeps all.
std::vector<ModelSummary> jpp(const PosteriorDraws& draws, std::size_t top_k = 0);

// max_k |MPP_k - sum of JPP over models containing k|. Computed on visit
// counts, so it is exactly zero for any chain.
double mpp_jpp_consistency(const PosteriorDraws& draws);

// Total visit mass over all distinct models divided by the draw count.
double total_jpp(const std::vector<ModelSummary>& models, std::size_t draw_count);

struct InclusionMatrix {
  Eigen::MatrixXi bits;  // M x P
  std::vector<double> jpp;
  bool truncated = false;  // fewer distinct models than requested
};

InclusionMatrix inclusion_matrix(const std::vector<ModelSummary>& models, std::size_t requested_rows);

// Factor indices ordered by descending MPP (ties -> lower index first).
std::vector<std::size_t> rank_by_mpp(const std::vector<FactorSummary>& summaries);

// Display rows for a Table-1 style report: every factor in `always_show`
// followed by the next `extra` highest-MPP factors not already listed.
std::vector<std::size_t> table_rows_with_next_highest(const std::vector<FactorSummary>& summaries,
                                                      const std::vector<std::size_t>& always_show,
                                                      std::size_t extra);

}  // namespace bvs
