#include <benchmark/benchmark.h>

#include <random>

#include "bvs/prediction.hpp"
#include "bvs/sampler.hpp"

namespace {

bvs::Dataset make_probit(std::size_t n, std::size_t p, std::uint64_t seed) {
  bvs::Rng rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = nd(rng);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = x(i, 0) - 0.5 * x(i, 1) + nd(rng) > 0 ? 1.0 : 0.0;
  return bvs::standardize(bvs::make_dataset(x, y));
}

void BM_LogMarginal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto size = static_cast<std::size_t>(state.range(1));
  const bvs::Dataset ds = make_probit(n, 50, 1);
  bvs::LatentLinearModel model(ds, bvs::default_prior(50, 5));
  bvs::Rng rng(2);
  model.set_latent(bvs::gibbs_latent_update(ds, Eigen::VectorXd::Zero(51), rng));
  std::vector<std::uint8_t> bits(50, 0);
  for (std::size_t k = 0; k < size; ++k) bits[k] = 1;
  const bvs::ModelIndicator gamma(bits);
  for (auto _ : state) benchmark::DoNotOptimize(model.log_marginal(gamma));
}
BENCHMARK(BM_LogMarginal)->Args({238, 3})->Args({238, 10})->Args({2000, 10});

void BM_ChainSweeps(benchmark::State& state) {
  const bvs::Dataset ds = make_probit(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 3);
  bvs::ChainConfig chain;
  chain.iterations = 1000;
  chain.burn_in = 0;
  const auto prior = bvs::default_prior(ds.num_factors(), 5);
  for (auto _ : state) benchmark::DoNotOptimize(bvs::run_chain(ds, prior, chain).size());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(chain.iterations));
}
BENCHMARK(BM_ChainSweeps)->Args({238, 50})->Args({500, 20})->Unit(benchmark::kMillisecond);

void BM_Auc(benchmark::State& state) {
  bvs::Rng rng(4);
  std::normal_distribution<double> nd;
  std::vector<double> s(static_cast<std::size_t>(state.range(0)));
  std::vector<int> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = nd(rng);
    y[i] = static_cast<int>(i % 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(bvs::auc(s, y));
}
BENCHMARK(BM_Auc)->Range(256, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
