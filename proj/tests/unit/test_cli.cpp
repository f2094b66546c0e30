#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fpld/app.hpp"
#include "fpld/commands.hpp"
#include "fpld/config.hpp"
#include "fpld/report.hpp"

using namespace fpld::cli;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  if (!args.empty() && args[0] != "--help" &&
      std::find(args.begin(), args.end(), "--format") == args.end()) {
    args.insert(args.end(), {"--format", "json"});
  }
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fpld_test_" + name);
}

}  // namespace

TEST(PopulationSpec, ParseAndRender) {
  const auto s = PopulationSpec::parse("power:100:1");
  EXPECT_EQ(s.N, 100u);
  EXPECT_EQ(s.alpha, 1.0);
  EXPECT_EQ(s.str(), "power:100:1.0");
  EXPECT_EQ(PopulationSpec::parse(s.str()), s);
  EXPECT_EQ(PopulationSpec::parse("file:/tmp/x.txt").path, "/tmp/x.txt");
  EXPECT_THROW(PopulationSpec::parse("power:1:1"), ConfigError);
  EXPECT_THROW(PopulationSpec::parse("power:10"), ConfigError);
  EXPECT_THROW(PopulationSpec::parse("gauss:10:1"), ConfigError);
  EXPECT_THROW(PopulationSpec::parse("file:/nonexistent/fpld").load(), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c;
  c.population = PopulationSpec::parse("power:50:2");
  c.n = 12;
  c.x_grid = {0.5, 1.5};
  c.reps = 1234;
  c.seed = 9;
  c.workers = 3;
  c.A = 0.7;
  c.xi = 0.25;
  c.xi1 = -4;
  c.h = 0.1;
  c.statistic = Statistic::quadratic;
  c.methods = {"mc", "saddlepoint"};
  c.tangent = "sqrt_n";
  const json j = c;
  EXPECT_EQ(j.get<ExperimentConfig>(), c);
  EXPECT_EQ(json(ExperimentConfig{}).get<ExperimentConfig>(), ExperimentConfig{});
}

TEST(Config, Rejections) {
  EXPECT_THROW(json::parse(R"({"bogus": 1})").get<ExperimentConfig>(), ConfigError);
  EXPECT_THROW(json::parse(R"({"methods": ["nope"]})").get<ExperimentConfig>().normalize(), ConfigError);
  EXPECT_THROW(json::parse(R"({"tangent": "best"})").get<ExperimentConfig>().normalize(), ConfigError);
  EXPECT_THROW(json::parse(R"({"x": []})").get<ExperimentConfig>().normalize(), ConfigError);
  EXPECT_THROW(parse_number_list("1,abc"), ConfigError);
  EXPECT_EQ(parse_number_list("1,,2,"), (std::vector<double>{1, 2}));
  EXPECT_EQ(parse_number_list("1, 2.5,3"), (std::vector<double>{1, 2.5, 3}));
}

TEST(Report, JsonRoundTrip) {
  ExperimentConfig c;
  c.population = PopulationSpec::parse("power:40:1");
  c.x_grid = {0.5, 1.0};
  c.reps = 2000;
  c.methods = {"mc", "dp", "saddlepoint"};
  const Report r = cmd_tail(c);
  // the saddlepoint value is a column of every row, not a row of its own
  ASSERT_EQ(r.rows.size(), 4u);
  for (const auto& row : r.rows) EXPECT_TRUE(row.saddlepoint.has_value());
  const json j = r;
  EXPECT_EQ(j.get<Report>(), r);
  EXPECT_EQ(j["rows"][0].count("stderr"), 1u);
}

TEST(Report, WilsonInterval) {
  const auto [lo, hi] = wilson_interval(0.0, 100);
  EXPECT_NEAR(lo, 0.0, 1e-15);
  EXPECT_NEAR(hi, 0.03699, 1e-4);
  const auto [lo2, hi2] = wilson_interval(0.5, 100);
  EXPECT_NEAR(lo2, 0.40383, 1e-4);
  EXPECT_NEAR(hi2, 0.59617, 1e-4);
}

TEST(Report, CsvHasHeaderAndRows) {
  ExperimentConfig c;
  c.population = PopulationSpec::parse("power:20:1");
  c.x_grid = {0.0, 1.0, 2.0};
  c.methods = {"enum"};
  std::ostringstream os;
  write_report(os, cmd_tail(c), Format::csv);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  std::getline(is, line);
  EXPECT_NE(line.find("p_hat"), std::string::npos);
  while (std::getline(is, line)) ++lines;
  EXPECT_EQ(lines, 3);
}

TEST(App, ExitCodes) {
  EXPECT_EQ(invoke({"moments", "--population", "power:100:1"}).code, kSuccess);
  EXPECT_EQ(invoke({"moments", "--population", "gauss:1"}).code, kConfigError);
  EXPECT_EQ(invoke({"tail", "--population", "power:100:1", "--methods", "bogus"}).code, kConfigError);
  EXPECT_EQ(invoke({"tail", "--population", "power:100:1", "--n", "100"}).code, kConfigError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kConfigError);
  EXPECT_EQ(invoke({"envelope", "--population", "power:100:1"}).code, kConfigError);
  // enumeration guard
  EXPECT_EQ(invoke({"tail", "--population", "power:60:1", "--methods", "enum"}).code, kConfigError);
  EXPECT_EQ(invoke({"validate", "--level", "quick", "--inject-fault", "k2"}).code, kPropertyFailure);
  EXPECT_EQ(invoke({"--help"}).code, kSuccess);
}

TEST(App, TTailAlias) {
  const auto a = invoke({"t-tail", "--population", "power:60:1", "--x", "1,2", "--reps", "3000"});
  const auto b = invoke({"tail", "--statistic", "t", "--population", "power:60:1", "--x", "1,2",
                         "--reps", "3000"});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto ja = json::parse(a.out), jb = json::parse(b.out);
  EXPECT_EQ(ja["rows"], jb["rows"]);
  EXPECT_EQ(ja["rows"][0]["statistic"], "t");
}

TEST(App, QuadraticWithZeroParametersIsSum) {
  const std::vector<std::string> common{"--population", "power:20:1", "--n", "6", "--x", "0.5,1,2",
                                        "--methods", "enum"};
  auto q = common;
  q.insert(q.begin(), "quadratic");
  auto s = common;
  s.insert(s.begin(), "tail");
  const auto jq = json::parse(invoke(q).out), js = json::parse(invoke(s).out);
  ASSERT_EQ(jq["rows"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(jq["rows"][i]["p_hat"], js["rows"][i]["p_hat"]) << i;
  }
}

TEST(App, ConfigFileAndFlagOverride) {
  const auto path = temp_path("config.json");
  {
    std::ofstream f(path);
    f << R"({"population": "power:30:1", "n": 10, "x": [1.0], "methods": ["dp"]})";
  }
  const auto a = json::parse(invoke({"tail", "--config", path.string()}).out);
  EXPECT_EQ(a["rows"][0]["n"], 10);
  const auto b = json::parse(invoke({"tail", "--config", path.string(), "--n", "5"}).out);
  EXPECT_EQ(b["rows"][0]["n"], 5);
  std::filesystem::remove(path);
  EXPECT_EQ(invoke({"tail", "--config", "/nonexistent/fpld.json"}).code, kConfigError);
}

TEST(App, Table1SmokeAndDeterminism) {
  const std::vector<std::string> args{"table1", "--population", "power:100:1", "--reps", "10000",
                                      "--workers", "4"};
  const auto a = invoke(args), b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = json::parse(a.out);
  ASSERT_EQ(j["rows"].size(), 3u);
  for (const auto& row : j["rows"]) {
    EXPECT_GT(row["ratio"].get<double>(), 0.5);
    EXPECT_LT(row["ratio"].get<double>(), 4.0);
    EXPECT_TRUE(row.contains("implied_A"));
  }
  EXPECT_TRUE(j["summary"].contains("max_implied_A"));
  auto other_seed = args;
  other_seed.insert(other_seed.end(), {"--seed", "2"});
  EXPECT_NE(invoke(other_seed).out, a.out);
}

TEST(App, OutFileMatchesStdout) {
  const auto path = temp_path("report.csv");
  const std::vector<std::string> args{"tail", "--population", "power:30:1", "--n", "10",
                                      "--methods", "dp", "--format", "csv"};
  const auto direct = invoke(args);
  auto with_out = args;
  with_out.insert(with_out.end(), {"--out", path.string()});
  ASSERT_EQ(invoke(with_out).code, 0);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), direct.out);
  std::filesystem::remove(path);
}
