#include <gtest/gtest.h>

#include <cmath>

#include "bvs/error.hpp"
#include "bvs/sensitivity.hpp"
#include "test_support.hpp"

using namespace bvs;

namespace {

ChainConfig short_chain(std::uint64_t seed) {
  ChainConfig c;
  c.iterations = 700;
  c.burn_in = 100;
  c.seed = seed;
  return c;
}

SensitivityCurve curve_of(std::vector<double> mpps) {
  SensitivityCurve c;
  c.grid = default_sensitivity_grid();
  c.mpp_at = std::move(mpps);
  return c;
}

}  // namespace

TEST(Sensitivity, DefaultGrid) {
  const auto g = default_sensitivity_grid();
  ASSERT_EQ(g.size(), 11u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_DOUBLE_EQ(g[3], 0.3);
}

TEST(Sensitivity, EndpointsAreExact) {
  const Dataset ds = testkit::probit_dataset(150, Eigen::Vector4d(0.0, 1.0, 0.0, 0.4), 1);
  for (const char* name : {"x1", "x2"}) {
    const auto curve = prior_sweep(ds, name, {0.0, 0.5, 1.0}, 0.78, short_chain(3), default_prior(3, 1));
    EXPECT_EQ(curve.mpp_at[0], 0.0) << name;
    EXPECT_EQ(curve.mpp_at[2], 1.0) << name;
    EXPECT_GE(curve.mpp_at[1], 0.0);
    EXPECT_LE(curve.mpp_at[1], 1.0);
  }
}

TEST(Sensitivity, SeedsPerGridPointAndJobsIndependence) {
  const Dataset ds = testkit::probit_dataset(120, Eigen::Vector3d(0.0, 0.5, 0.0), 2);
  const auto grid = default_sensitivity_grid();
  const auto a = prior_sweep(ds, "x2", grid, 0.5, short_chain(9), default_prior(2, 1), 1);
  const auto b = prior_sweep(ds, "x2", grid, 0.5, short_chain(9), default_prior(2, 1), 4);
  EXPECT_EQ(a.mpp_at, b.mpp_at);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(a.seeds[i], derive_seed(9, i));
    EXPECT_TRUE(a.errors[i].empty());
  }
}

TEST(Sensitivity, StrongFactorIsRobustIn) {
  const Dataset ds = testkit::probit_dataset(300, Eigen::Vector3d(0.0, 1.5, 0.0), 4);
  const auto curve = prior_sweep(ds, "x1", default_sensitivity_grid(), 0.78, short_chain(5), default_prior(2, 1));
  EXPECT_EQ(classify_sensitivity(curve), SensitivityClass::robust_in);
}

TEST(Sensitivity, InvalidArguments) {
  const Dataset ds = testkit::probit_dataset(40, Eigen::Vector3d(0.0, 1.0, 0.0), 5);
  const PriorConfig base = default_prior(2, 1);
  EXPECT_THROW(prior_sweep(ds, "zz", {0.5}, 0.78, short_chain(1), base), Error);
  EXPECT_THROW(prior_sweep(ds, "x1", {0.5}, 1.0, short_chain(1), base), ConfigError);
  EXPECT_THROW(prior_sweep(ds, "x1", {0.5, 0.2}, 0.78, short_chain(1), base), ConfigError);
  EXPECT_THROW(prior_sweep(ds, "x1", {1.2}, 0.78, short_chain(1), base), ConfigError);
  EXPECT_THROW(prior_sweep(ds, "x1", {}, 0.78, short_chain(1), base), ConfigError);
}

TEST(Classify, Rules) {
  EXPECT_EQ(classify_sensitivity(curve_of({0, .6, .7, .8, .8, .9, .9, .9, .95, .97, 1})), SensitivityClass::robust_in);
  EXPECT_EQ(classify_sensitivity(curve_of({0, .01, .01, .02, .03, .04, .05, .06, .07, .09, 1})),
            SensitivityClass::robust_out);
  EXPECT_EQ(classify_sensitivity(curve_of({0, .1, .2, .3, .4, .5, .6, .7, .8, .9, 1})),
            SensitivityClass::prior_driven);
  // Endpoints never decide the class.
  EXPECT_EQ(classify_sensitivity(curve_of({0, .6, .6, .6, .6, .6, .6, .6, .6, .6, 1})), SensitivityClass::robust_in);
  SensitivityCurve few;
  few.grid = {0.0, 0.5, 1.0};
  few.mpp_at = {0.0, 0.5, 1.0};
  EXPECT_THROW(classify_sensitivity(few), ConfigError);
  EXPECT_STREQ(to_string(SensitivityClass::prior_driven), "prior-driven");
}
