#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bvs/error.hpp"
#include "bvs/summaries.hpp"
#include "test_support.hpp"

using namespace bvs;
using testkit::synthetic_draws;

TEST(Mpp, SpecExample) {
  const auto d = synthetic_draws({"10", "11", "10", "00"}, 1);
  const auto s = mpp(d);
  EXPECT_DOUBLE_EQ(s[0].mpp, 0.75);
  EXPECT_DOUBLE_EQ(s[1].mpp, 0.25);
  EXPECT_EQ(s[0].inclusion_count, 3u);
  EXPECT_EQ(s[0].name, "f1");
}

TEST(Mpp, ConditionalMomentsOverIncludedDrawsOnly) {
  auto d = synthetic_draws({"1", "0", "1", "1"}, 2);
  d.betas(0, 1) = 1.0;
  d.betas(2, 1) = 2.0;
  d.betas(3, 1) = 3.0;
  const auto s = mpp(d);
  EXPECT_DOUBLE_EQ(*s[0].beta_mean_given_included, 2.0);
  EXPECT_DOUBLE_EQ(*s[0].beta_sd_given_included, 1.0);
}

TEST(Mpp, ConstantCoefficientIsExact) {
  auto d = synthetic_draws(std::vector<std::string>(1000, "1"), 3);
  d.betas.col(1).setConstant(0.1);
  const auto s = mpp(d);
  EXPECT_EQ(*s[0].beta_mean_given_included, 0.1);
  EXPECT_EQ(*s[0].beta_sd_given_included, 0.0);
}

TEST(Mpp, NeverIncludedHasNoMoments) {
  const auto s = mpp(synthetic_draws({"01", "01"}, 4));
  EXPECT_EQ(s[0].mpp, 0.0);
  EXPECT_FALSE(s[0].beta_mean_given_included);
  EXPECT_TRUE(s[1].beta_mean_given_included);
}

TEST(Mpp, EmptyChainIsAnError) {
  PosteriorDraws d;
  d.factor_names = {"a"};
  EXPECT_THROW(mpp(d), DataError);
  EXPECT_THROW(jpp(d), DataError);
}

TEST(Jpp, SpecExample) {
  const auto d = synthetic_draws({"10", "11", "10", "00"}, 5);
  const auto m = jpp(d);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].indicator.to_string(), "10");
  EXPECT_DOUBLE_EQ(m[0].jpp, 0.5);
  EXPECT_EQ(m[0].rank, 1u);
  // Ties ordered lexicographically.
  EXPECT_EQ(m[1].indicator.to_string(), "00");
  EXPECT_EQ(m[2].indicator.to_string(), "11");
  EXPECT_DOUBLE_EQ(m[1].jpp, 0.25);
  EXPECT_EQ(jpp(d, 1).size(), 1u);
}

TEST(Jpp, SingleModelChain) {
  const auto m = jpp(synthetic_draws(std::vector<std::string>(37, "101"), 6));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].jpp, 1.0);
}

TEST(Summaries, CountingIdentitiesOnRandomChains) {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t p = 1 + rng() % 12;
    const std::size_t n = 1 + rng() % 500;
    std::vector<std::string> pats(n);
    for (auto& s : pats) {
      s.resize(p);
      for (auto& c : s) c = rng() % 3 == 0 ? '1' : '0';
    }
    const auto d = synthetic_draws(pats, rng());
    const auto factors = mpp(d);
    const auto models = jpp(d);
    EXPECT_LE(mpp_jpp_consistency(d), 1e-12);
    EXPECT_NEAR(total_jpp(models, d.size()), 1.0, 1e-12);
    for (std::size_t k = 0; k < p; ++k) {
      double via = 0.0;
      for (const auto& m : models)
        if (m.indicator.test(k)) via += m.jpp;
      EXPECT_NEAR(via, factors[k].mpp, 1e-12);
    }
    const std::set<std::string> distinct(pats.begin(), pats.end());
    EXPECT_EQ(models.size(), distinct.size());
    for (std::size_t r = 1; r < models.size(); ++r) EXPECT_GE(models[r - 1].jpp, models[r].jpp);
  }
}

TEST(InclusionMatrix, RowsMatchModels) {
  const auto models = jpp(synthetic_draws({"110", "110", "011", "000"}, 8));
  const auto im = inclusion_matrix(models, 10);
  EXPECT_TRUE(im.truncated);
  ASSERT_EQ(im.bits.rows(), 3);
  ASSERT_EQ(im.bits.cols(), 3);
  EXPECT_EQ(im.bits.row(0), Eigen::RowVector3i(1, 1, 0));
  EXPECT_DOUBLE_EQ(im.jpp[0], 0.5);
  const auto two = inclusion_matrix(models, 2);
  EXPECT_FALSE(two.truncated);
  EXPECT_EQ(two.bits.rows(), 2);
}

TEST(RankByMpp, TiesToLowerIndex) {
  const auto s = mpp(synthetic_draws({"0110", "0100", "1011"}, 9));
  EXPECT_EQ(rank_by_mpp(s), (std::vector<std::size_t>{1, 2, 0, 3}));
}

TEST(TableRows, AlwaysShownThenNextHighest) {
  const auto s = mpp(synthetic_draws({"01100", "01100", "01010", "10000"}, 10));
  // MPPs: f1 .25, f2 .75, f3 .5, f4 .25, f5 0
  EXPECT_EQ(table_rows_with_next_highest(s, {4}, 2), (std::vector<std::size_t>{4, 1, 2}));
  EXPECT_EQ(table_rows_with_next_highest(s, {1}, 10).size(), 5u);
}
