#include "bvs/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "bvs/error.hpp"

namespace bvs {

LeverageReport leverage(const Dataset& ds, const LeverageOptions& options) {
  const Eigen::MatrixXd& x = ds.design();
  const auto n = x.rows();
  const auto cols = x.cols();
  LeverageReport report;
  if (n == 0) return report;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() == cols) {
    // h_i = ||Q_1 row i||^2 with Q_1 the thin orthonormal factor.
    Eigen::HouseholderQR<Eigen::MatrixXd> hqr(x);
    const Eigen::MatrixXd q = hqr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
    report.h = q.rowwise().squaredNorm();
  } else {
    report.ridge_fallback = true;
    report.warnings.push_back("design is rank deficient; leverage computed with ridge jitter " +
                              std::to_string(options.ridge));
    const Eigen::MatrixXd gram = x.transpose() * x + options.ridge * Eigen::MatrixXd::Identity(cols, cols);
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    const Eigen::MatrixXd half = llt.matrixL().solve(x.transpose());
    report.h = half.colwise().squaredNorm().transpose();
  }
  report.h = report.h.cwiseMax(0.0).cwiseMin(1.0);

  report.threshold = options.threshold_multiplier * static_cast<double>(cols) / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (report.h[i] > report.threshold) report.flagged.push_back(static_cast<std::size_t>(i));

  if (options.group_by) {
    std::vector<std::size_t> dummies;
    std::string reference;
    for (const auto& e : ds.encoding_log().expansions)
      if (e.source_column == *options.group_by) reference = e.reference;
    for (std::size_t k = 0; k < ds.num_factors(); ++k)
      if (ds.factors()[k].source_column == *options.group_by) dummies.push_back(k);
    if (dummies.empty()) throw ConfigError("leverage: no design columns derive from '" + *options.group_by + "'");
    report.groups.assign(static_cast<std::size_t>(n), reference.empty() ? std::string("reference") : reference);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (std::size_t k : dummies) {
        if (x(i, static_cast<Eigen::Index>(k + 1)) != 0.0) {
          const FactorInfo& f = ds.factors()[k];
          report.groups[static_cast<std::size_t>(i)] = f.level.empty() ? f.name : f.level;
          break;
        }
      }
    }
  }
  return report;
}

AcceptanceRates acceptance_rate(const ChainTelemetry& t) {
  auto rate = [](std::uint64_t acc, std::uint64_t prop) {
    return prop == 0 ? 0.0 : static_cast<double>(acc) / static_cast<double>(prop);
  };
  return AcceptanceRates{rate(t.add_delete.accepted, t.add_delete.proposed), rate(t.swap.accepted, t.swap.proposed),
                         rate(t.add_delete.accepted + t.swap.accepted, t.add_delete.proposed + t.swap.proposed)};
}

EssResult effective_sample_size(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 10) throw DataError("effective_sample_size: need at least 10 values");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = series[i] - mean;

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += c[i] * c[i + lag];
    return s / static_cast<double>(n);
  };
  const double var0 = autocov(0);
  if (!(var0 > 0.0)) return EssResult{static_cast<double>(n), true};

  // tau = -1 + 2 * sum of consecutive-pair sums Gamma_m while they stay positive.
  double tau = -1.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = (autocov(2 * m) + autocov(2 * m + 1)) / var0;
    if (!(pair > 0.0)) break;
    tau += 2.0 * pair;
  }
  const double ess = static_cast<double>(n) / std::max(tau, 1e-12);
  return EssResult{std::min(ess, static_cast<double>(n)), false};
}

}  // namespace bvs
