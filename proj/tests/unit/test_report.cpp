#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "bvs/csv.hpp"
#include "bvs/error.hpp"
#include "bvs/report.hpp"
#include "test_support.hpp"

using namespace bvs;

namespace {

csv::Table written(const std::function<void(std::ostream&)>& write) {
  std::ostringstream os;
  write(os);
  return csv::parse(os.str());
}

}  // namespace

TEST(Report, MppCsvRoundTrip) {
  auto d = testkit::synthetic_draws({"10", "11", "10", "00"}, 1);
  d.factor_names = {"age", "centre, east"};
  const auto s = mpp(d);
  const auto t = written([&](std::ostream& os) { report::write_mpp_csv(os, s); });
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.header[1], "mpp");
  EXPECT_EQ(t.rows[1][0], "centre, east");
  EXPECT_EQ(*csv::parse_double(t.rows[0][1]), 0.75);
  EXPECT_EQ(*csv::parse_double(t.rows[0][3]), *s[0].beta_mean_given_included);

  const auto some = written([&](std::ostream& os) { report::write_mpp_csv(os, s, {1}); });
  ASSERT_EQ(some.rows.size(), 1u);
  EXPECT_EQ(some.rows[0][0], "centre, east");
}

TEST(Report, MppCsvNeverIncludedHasEmptyCells) {
  const auto s = mpp(testkit::synthetic_draws({"01", "01"}, 2));
  const auto t = written([&](std::ostream& os) { report::write_mpp_csv(os, s); });
  EXPECT_EQ(t.rows[0][3], "");
  EXPECT_EQ(t.rows[0][4], "");
}

TEST(Report, JppAndInclusion) {
  const auto d = testkit::synthetic_draws({"110", "110", "011", "000"}, 3);
  const auto models = jpp(d);
  const auto t = written([&](std::ostream& os) { report::write_jpp_csv(os, models, d.factor_names, {0.7, 0.6, 0.5}); });
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0][1], "f1;f2");
  EXPECT_EQ(t.rows[0][2], "110");
  EXPECT_EQ(t.rows[0][5], "0.7");
  EXPECT_THROW(
      {
        std::ostringstream os;
        report::write_jpp_csv(os, models, d.factor_names, {0.5});
      },
      ConfigError);

  const auto inc = written([&](std::ostream& os) {
    report::write_inclusion_csv(os, inclusion_matrix(models, 2), d.factor_names);
  });
  EXPECT_EQ(inc.header, (std::vector<std::string>{"rank", "jpp", "f1", "f2", "f3"}));
  ASSERT_EQ(inc.rows.size(), 2u);
  EXPECT_EQ(inc.rows[0][2], "1");
  EXPECT_EQ(inc.rows[0][4], "0");
}

TEST(Report, CorrelationUndefinedCellsAreEmpty) {
  Eigen::MatrixXd x(5, 2);
  x << 1, 3, 2, 3, 3, 3, 4, 3, 5, 3;
  const Dataset ds = make_dataset(x, Eigen::VectorXd::Zero(5));
  const auto t = written([&](std::ostream& os) {
    report::write_correlation_csv(os, correlation_matrix(ds), ds.factor_names());
  });
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(*csv::parse_double(t.rows[0][1]), 1.0);
  EXPECT_EQ(t.rows[0][2], "");
}

TEST(Report, RocAndSensitivity) {
  const std::vector<RocPoint> roc{{0, 0}, {0.5, 1}, {1, 1}};
  const auto t = written([&](std::ostream& os) { report::write_roc_csv(os, roc); });
  EXPECT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[1][0], "0.5");

  SensitivityCurve c;
  c.factor = "age";
  c.grid = {0.0, 1.0};
  c.mpp_at = {0.0, NAN};
  c.seeds = {11, 12};
  c.errors = {"", "chain failed"};
  const auto s = written([&](std::ostream& os) { report::write_sensitivity_csv(os, c); });
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.rows[1][2], "");
  EXPECT_EQ(s.rows[1][4], "12");
  EXPECT_EQ(s.rows[1][5], "chain failed");
}

TEST(Report, ComparisonJoinsColumns) {
  const Dataset ds = testkit::probit_dataset(300, Eigen::Vector3d(0.0, 1.0, 0.0), 4);
  const ScreenResult screen = single_factor_screen(ds);
  const StepwiseResult step = stepwise_select(ds, screen.retained);
  auto d = testkit::synthetic_draws({"10", "10", "11"}, 5);
  d.factor_names = ds.factor_names();
  const auto rows = report::build_comparison(screen, step, mpp(d));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].p_single, screen.rows[0].p);
  ASSERT_TRUE(rows[0].p_multi);
  EXPECT_FALSE(rows[1].p_multi);
  const auto t = written([&](std::ostream& os) { report::write_comparison_csv(os, rows); });
  EXPECT_EQ(t.header.size(), 6u);
  EXPECT_EQ(t.rows[1][2], "");
}

TEST(Report, PredictionJsonNullsForNaN) {
  PredictionReport r;
  r.per_fold_auc = {0.7, NAN};
  r.mean_fold_auc = NAN;
  r.roc = {{0, 0}, {1, 1}};
  const std::string text = report::prediction_report_json(r);
  EXPECT_NE(text.find("\"refit-subset\""), std::string::npos);
  EXPECT_NE(text.find("null"), std::string::npos);
  EXPECT_EQ(text.find("nan"), std::string::npos);
}
