#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmo/errors.hpp"
#include "bmo/harness.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bmo_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    out.push_back(cols);
  }
  return out;
}

}  // namespace

TEST(ParseConfig, ZoomingSetting) {
  const auto c = bmo::parse_config(
      {"--algo", "z", "--alpha", "1", "--eta", "0.001", "--eps", "0.01", "--T", "2500", "--env",
       "himmelblau"});
  EXPECT_EQ(c.algo, "z");
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_EQ(c.eta, 0.001);
  EXPECT_EQ(c.eps, 0.01);
  EXPECT_EQ(c.horizon, 2500);
  EXPECT_EQ(c.env, "himmelblau");
}

TEST(ParseConfig, DeltaListAndAliases) {
  const auto c = bmo::parse_config({"--env", "log1d", "--horizon", "12", "--delta", "0.01,0.1"});
  EXPECT_EQ(c.horizon, 12);
  EXPECT_EQ(c.deltas, (std::vector<double>{0.01, 0.1}));
}

TEST(ParseConfig, MissingEnvNamesTheFlag) {
  try {
    bmo::parse_config({"--algo", "p"});
    FAIL();
  } catch (const bmo::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("--env"), std::string::npos);
  }
}

TEST(ParseConfig, AlphaAboveBoundCitesFormula) {
  try {
    bmo::parse_config({"--algo", "z", "--env", "log1d", "--alpha", "1000"});
    FAIL();
  } catch (const bmo::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("--alpha"), std::string::npos);
    EXPECT_NE(msg.find("sqrt(2 ln(2T^2/eps)) / ln(M_d/eta)"), std::string::npos);
  }
}

TEST(ParseConfig, RejectsUnknownFlagsTypesAndRanges) {
  EXPECT_THROW(bmo::parse_config({"--env", "log1d", "--bogus", "1"}), bmo::ConfigError);
  EXPECT_THROW(bmo::parse_config({"--env", "log1d", "--T", "abc"}), bmo::ConfigError);
  EXPECT_THROW(bmo::parse_config({"--env", "log1d", "--eps", "1.5"}), bmo::ConfigError);
  EXPECT_THROW(bmo::parse_config({"--env", "nowhere"}), bmo::ConfigError);
  EXPECT_THROW(bmo::parse_config({"--env", "log1d", "--algo", "hoo"}), bmo::ConfigError);
}

TEST(ParseConfig, FlagsOverrideFile) {
  const auto dir = fresh_dir("cfg");
  fs::create_directories(dir);
  const auto file = dir / "c.json";
  std::ofstream(file) << R"({"env": "log1d", "T": 50, "eps": 0.2, "delta": [0.05]})";
  const auto c = bmo::parse_config({"--config", file.string(), "--T", "70"});
  EXPECT_EQ(c.env, "log1d");
  EXPECT_EQ(c.horizon, 70);
  EXPECT_EQ(c.eps, 0.2);
  EXPECT_EQ(c.deltas, std::vector<double>{0.05});
}

TEST(ConfigFromJson, ErrorsCarryPosition) {
  try {
    bmo::config_from_json("{\n  \"env\": \"log1d\",\n  \"T\": ,\n}");
    FAIL();
  } catch (const bmo::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(bmo::config_from_json(R"({"T": "many"})"), bmo::ConfigError);
  EXPECT_THROW(bmo::config_from_json(R"({"speed": 1})"), bmo::ConfigError);
}

TEST(Baselines, RandomUsesGridCellsNearEta) {
  EXPECT_EQ(bmo::surrogate_grid_depth(0.001, 1), 10);
  EXPECT_EQ(bmo::surrogate_grid_depth(0.001, 2), 5);
  bmo::RunConfig c;
  c.env = "log1d";
  c.horizon = 100;
  const auto trace = bmo::baseline_random(c, bmo::builtin("log1d"), 3);
  ASSERT_EQ(trace.rows.size(), 100u);
  for (const auto& r : trace.rows) {
    EXPECT_EQ(r.cube.depth(), 10);
    EXPECT_TRUE(r.cube.contains(r.arm));
  }
}

TEST(Baselines, ConstantEnvHasNoRegretSpread) {
  bmo::RunConfig c;
  c.env = "constant";
  c.horizon = 200;
  const auto env = bmo::builtin("constant", 0.1, 2);
  const auto trace = bmo::baseline_random(c, env, 1);
  bmo::AdmissibilityReport report;
  report.delta = 0.5;
  report.f_delta = 0.25;
  report.admissible = true;
  const auto ledger = bmo::build_ledger(trace, env, report);
  for (const auto& r : ledger.rows) EXPECT_EQ(r.regret, 0.25);
}

TEST(Baselines, RandomGapAveragesToFDelta) {
  bmo::RunConfig c;
  c.env = "log1d";
  c.horizon = 20000;
  const auto env = bmo::builtin("log1d", 0.1);
  const auto report = bmo::f_delta(env, 0.1);
  const auto ledger = bmo::build_ledger(bmo::baseline_random(c, env, 5), env, report);
  EXPECT_NEAR(ledger.rows.back().cum_gap / 20000.0, report.f_delta, 0.03);
}

TEST(Baselines, GridUcbStaysOnGrid) {
  bmo::RunConfig c;
  c.env = "himmelblau";
  c.horizon = 300;
  c.eta = 1.0 / 64;
  const auto trace = bmo::baseline_grid_ucb(c, bmo::builtin("himmelblau"), 2);
  EXPECT_EQ(trace.final_cubes.size(), 64u);
  EXPECT_TRUE(bmo::check_partition(trace.final_cubes).ok());
  for (const auto& r : trace.rows) EXPECT_EQ(r.cube.depth(), 3);
}

TEST(RunExperiment, DeterministicFilesAndAggregates) {
  bmo::RunConfig c;
  c.env = "log2x";
  c.horizon = 300;
  c.replications = 3;
  c.jobs = 3;
  c.deltas = {0.01, 0.1};
  const auto dir_a = fresh_dir("a");
  c.out_dir = dir_a.string();
  const auto first = bmo::run_experiment(c);
  c.jobs = 1;
  c.out_dir = fresh_dir("b").string();
  bmo::run_experiment(c);
  for (int i = 0; i < 3; ++i) {
    const std::string name = "trace_run" + std::to_string(i) + ".csv";
    const auto text = slurp(dir_a / name);
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text, slurp(fs::path(c.out_dir) / name));
  }
  ASSERT_EQ(first.runs.size(), 3u);
  EXPECT_NE(first.runs[0].trace.rows[0].arm, first.runs[1].trace.rows[0].arm);

  const fs::path dir(c.out_dir);
  EXPECT_TRUE(fs::exists(dir / "report.csv"));
  EXPECT_TRUE(fs::exists(dir / "config.json"));
  const auto agg = read_csv(dir / "aggregate_delta0.01.csv");
  ASSERT_EQ(agg.size(), 301u);
  EXPECT_EQ(agg[0][0], "t");
  EXPECT_EQ(agg[0][1], "cum_delta_regret");
  EXPECT_EQ(agg[0][5], "min_cube_measure");
  std::vector<std::vector<std::vector<std::string>>> runs;
  for (int i = 0; i < 3; ++i) {
    runs.push_back(read_csv(dir / ("ledger_run" + std::to_string(i) + "_delta0.01.csv")));
  }
  for (std::size_t row = 1; row < agg.size(); row += 37) {
    for (std::size_t col = 1; col <= 5; ++col) {
      double mean = 0.0;
      for (const auto& r : runs) mean += std::stod(r[row][col]);
      mean /= 3.0;
      if (std::isnan(mean)) {
        EXPECT_TRUE(std::isnan(std::stod(agg[row][col])));  // unbounded env: no finite max
        continue;
      }
      EXPECT_NEAR(std::stod(agg[row][col]), mean, 1e-9 * std::max(1.0, std::abs(mean)));
    }
  }
}

TEST(RunExperiment, SingleReplicationHasZeroSd) {
  bmo::RunConfig c;
  c.env = "log1d";
  c.algo = "z";
  c.horizon = 20;
  c.out_dir = fresh_dir("sd").string();
  const auto result = bmo::run_experiment(c);
  const auto agg = read_csv(fs::path(c.out_dir) / "aggregate_delta0.01.csv");
  for (std::size_t row = 1; row < agg.size(); ++row) {
    for (std::size_t col = 6; col <= 10; ++col) EXPECT_EQ(agg[row][col], "0");
  }
  EXPECT_EQ(result.runs[0].trace.provenance.at("algo"), "z");
  for (const auto& check : result.runs[0].checks) EXPECT_TRUE(check.passed) << check.checker;
}

TEST(RunExperiment, WarnsWhenDeltaIsBelowCubeBudget) {
  bmo::RunConfig c;
  c.env = "log1d";
  c.horizon = 3000;
  c.eps = 0.5;
  c.eta = 0.01;
  c.deltas = {0.011};
  const auto result = bmo::run_experiment(c, false);
  EXPECT_FALSE(result.warnings.empty());
}

TEST(WriteReport, LineFormat) {
  std::ostringstream out;
  bmo::write_report(out, {{"x", true, 1.0, 2.0, 0.5, ""}, {"y", false, 3.0, 2.0, 0.0, ""}});
  EXPECT_EQ(out.str(), "checker,status,estimate,bound,margin\nx,pass,1,2,0.5\ny,fail,3,2,0\n");
}
