#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bvs {

class Dataset;

// Inclusion vector over the P candidate factors. The intercept is not
// represented; it is always in the model.
class ModelIndicator {
 public:
  ModelIndicator() = default;
  explicit ModelIndicator(std::size_t num_factors);
  explicit ModelIndicator(std::vector<std::uint8_t> bits);
  // "0110" -> factors 2 and 3 included.
  static ModelIndicator parse(std::string_view bits);

  std::size_t num_factors() const { return bits_.size(); }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool test(std::size_t k) const { return bits_[k] != 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::vector<std::size_t> included() const;
  std::vector<std::size_t> excluded() const;

  ModelIndicator with_flipped(std::size_t k) const;
  ModelIndicator with_swapped(std::size_t in, std::size_t out) const;

  std::string to_string() const;

  // Lexicographic on the bit pattern.
  friend bool operator==(const ModelIndicator&, const ModelIndicator&) = default;
  friend std::strong_ordering operator<=>(const ModelIndicator& a, const ModelIndicator& b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t size_ = 0;
};

enum class SlabPolicy { g_prior, diagonal };

struct PriorConfig {
  // Per-factor prior inclusion probabilities.
  std::vector<double> w;
  SlabPolicy slab = SlabPolicy::g_prior;
  // g-prior scale; unset means g = n.
  std::optional<double> g;
  // Diagonal slab variance for factor coefficients.
  double v = 4.0;
  double expected_model_size = 5.0;
  // Intercept prior variance under the diagonal policy.
  double intercept_variance = 100.0;

  std::size_t num_factors() const { return w.size(); }
  double g_for(std::size_t n) const { return g.value_or(static_cast<double>(n)); }
  // Throws ConfigError on any violated invariant.
  void validate() const;
};

// Multiplicity-corrected weights: w_k = m / P so the prior expected model
// size is m whatever the number of candidates.
std::vector<double> multiplicity_weights(std::size_t num_factors, double expected_size);

// Default configuration for P factors: g-prior with g = n and
// multiplicity weights for the given expected model size.
PriorConfig default_prior(std::size_t num_factors, double expected_size = 5.0);

// log prod_k w_k^g_k (1 - w_k)^(1 - g_k). -inf when an indicator contradicts
// a prior probability of exactly 0 or 1.
double log_prior_model(const ModelIndicator& gamma, const PriorConfig& cfg);

// Slab prior covariance for the intercept plus the included factors, in
// design-column order.
Eigen::MatrixXd build_slab_covariance(const Dataset& ds, const ModelIndicator& gamma, const PriorConfig& cfg);

// Design column indices of the intercept plus the included factors.
std::vector<Eigen::Index> active_columns(const ModelIndicator& gamma);

// Precision form of the slab prior, given the Gram block X_A' X_A of the
// active columns. Throws RankDeficientError under the g-prior when the block
// is singular.
struct SlabPrecision {
  Eigen::MatrixXd precision;
  double log_det_covariance = 0.0;
};
SlabPrecision slab_precision(const Eigen::MatrixXd& active_gram, std::size_t n, const PriorConfig& cfg);

std::string prior_to_json(const PriorConfig& cfg);
PriorConfig prior_from_json(std::string_view json_text);

// Per-factor prior overrides: CSV with header "factor,w".
void apply_w_overrides(PriorConfig& cfg, const std::vector<std::string>& factor_names, std::string_view csv_text);

}  // namespace bvs
