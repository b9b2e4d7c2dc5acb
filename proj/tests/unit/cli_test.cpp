#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using stein_gauge::cli::run;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Invocation r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) / ("stein_gauge_cli_" + std::string(
                                                 ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

const char* kSelfDraws =
    "-0.62\n0.13\n1.41\n-1.05\n0.37\n-0.21\n0.88\n-1.73\n0.05\n0.59\n"
    "-0.44\n1.12\n-0.93\n0.26\n-0.08\n0.71\n-1.29\n0.47\n1.96\n-0.35\n";

}  // namespace

TEST_F(CliTest, FactorsForOneUnitDatapoint) {
  const auto data = write("one_unit_point.csv", "1,0,1\n");
  const auto r = invoke({"factors", "--target", "logistic", "--sigma2", "1", "--data", data});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.report();
  EXPECT_DOUBLE_EQ(j["results"]["factors"]["c1"].get<double>(), 2.0);
  EXPECT_NEAR(j["results"]["factors"]["c2"].get<double>(), 1.192450, 1e-6);
  EXPECT_NEAR(j["results"]["logistic_closed_form"]["c3"].get<double>(),
              j["results"]["factors"]["c3"].get<double>(), 1e-12);
  EXPECT_EQ(j["inputs"]["target"]["datapoints"], 1);
  EXPECT_TRUE(j.contains("timestamp"));
  EXPECT_EQ(j["version"], STEIN_GAUGE_VERSION);
}

TEST_F(CliTest, CertifyEmbedsMetricReport) {
  const auto samples = write("self_draws.csv", kSelfDraws);
  const auto r = invoke({"certify", "--target", "gaussian", "--samples", samples});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = r.report()["results"];
  EXPECT_GE(res["metrics"]["w1_upper"].get<double>(), 0.0);
  for (const char* key : {"d_smooth_upper", "w1_upper", "bl_upper", "dim", "e_norm_g"})
    EXPECT_TRUE(res["metrics"].contains(key)) << key;
  EXPECT_EQ(res["discrepancy"]["status"], "optimal");
  EXPECT_DOUBLE_EQ(res["discrepancy"]["inflation"].get<double>(), 1.0);
  EXPECT_EQ(res["discrepancy"]["graph"], "complete");
  EXPECT_DOUBLE_EQ(res["metrics"]["d_smooth_upper"].get<double>(), res["discrepancy"]["value"].get<double>());
}

TEST_F(CliTest, DiscrepancyReportFields) {
  const auto samples = write("pts.csv", "x,y,w\n0,0,1\n1,0,1\n0,1,2\n");
  const auto r = invoke({"discrepancy", "--samples", samples, "--samples-header", "--weights-column", "2", "--graph",
                         "knn:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = r.report()["results"];
  for (const char* key : {"value", "n", "d", "factors", "graph", "inflation"}) EXPECT_TRUE(res.contains(key)) << key;
  EXPECT_EQ(res["n"], 3);
  EXPECT_EQ(res["d"], 2);
  EXPECT_EQ(res["graph"], "knn:1");
  EXPECT_NEAR(res["inflation"].get<double>(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(res["scaled_factors"]["c1"].get<double>(), 2.0 * std::sqrt(2.0), 1e-14);
}

TEST_F(CliTest, Lemma2SuiteSmallRun) {
  const auto r = invoke({"verify-lemma2", "--instances", "10", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = r.report()["results"];
  EXPECT_EQ(res["second_order_violations"], 0);
  EXPECT_EQ(res["third_order_violations"], 0);
  EXPECT_EQ(res["instances"], 10);
}

TEST_F(CliTest, IdenticalRunsGiveIdenticalReports) {
  const auto samples = write("self_draws.csv", kSelfDraws);
  const std::vector<std::string> a{"discrepancy", "--samples", samples, "--no-timestamp"};
  EXPECT_EQ(invoke(a).out, invoke(a).out);
  const std::vector<std::string> b{"verify-coupling", "--replicas", "8", "--horizon", "1", "--seed", "3",
                                   "--no-timestamp"};
  const auto first = invoke(b);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, invoke(b).out);
  EXPECT_FALSE(first.report().contains("timestamp"));
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  const auto cfg = write("run.json", R"({"command": "wasserstein-bound", "smooth": 10, "dim": 2, "no-timestamp": true})");
  auto r = invoke({"--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(r.report()["results"]["w1_upper"].get<double>(), 30.0);
  r = invoke({"wasserstein-bound", "--config", cfg, "--smooth", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["inputs"]["smooth"], 0.0);
  EXPECT_EQ(r.report()["inputs"]["dim"], 2);
  EXPECT_EQ(r.report()["results"]["w1_upper"], 0.0);
  const auto bad = write("bad.json", R"({"command": "wasserstein-bound", "smooth": 1, "bogus": 3})");
  EXPECT_EQ(invoke({"--config", bad}).code, 2);
  EXPECT_EQ(invoke({"--config", (dir_ / "missing.json").string()}).code, 2);
}

TEST_F(CliTest, OutputFileAndPlotData) {
  const auto out = (dir_ / "report.json").string();
  const auto plots = (dir_ / "plots").string();
  const auto r = invoke({"simulate", "--horizon", "2", "--output", out, "--emit-plot-data", plots});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(out);
  const auto j = json::parse(f);
  EXPECT_EQ(j["results"]["contracts"].size(), 5u);
  std::ifstream series(fs::path(plots) / "contract2.csv");
  std::string header;
  std::getline(series, header);
  EXPECT_EQ(header, "t,measured,envelope,ratio");
}

TEST_F(CliTest, SmoothingSuitePasses) {
  const auto r = invoke({"verify-smoothing", "--function", "abs", "--probes", "20", "--scales", "0.1,1,10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.report()["results"]["passed"].get<bool>());
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"factors", "--target", "cauchy"}).code, 2);
  EXPECT_EQ(invoke({"discrepancy"}).code, 2);
  EXPECT_EQ(invoke({"discrepancy", "--samples", (dir_ / "none.csv").string()}).code, 2);
  EXPECT_EQ(invoke({"wasserstein-bound", "--smooth", "-1"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--dt", "3", "--horizon", "6"}).code, 2);
  const auto huge = write("huge.csv", "1e308\n0\n");
  EXPECT_EQ(invoke({"discrepancy", "--samples", huge, "--precision", "10"}).code, 3);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}
