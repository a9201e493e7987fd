#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "symq/cli/config.hpp"
#include "symq/cli/csv.hpp"
#include "symq/cli/experiment.hpp"
#include "symq/cloning.hpp"
#include "symq/trapping.hpp"

using namespace symq::cli;
namespace fs = std::filesystem;

namespace {

ExperimentConfig configure(Experiment e, std::initializer_list<std::pair<const char*, const char*>> settings) {
  ExperimentConfig c = defaults_for(e);
  for (const auto& [k, v] : settings) apply_setting(c, k, v);
  return c;
}

std::string render(const CsvTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

bool mentions(const std::vector<Diagnostic>& ds, Severity s, const std::string& field) {
  for (const auto& d : ds) {
    if (d.severity == s && d.field == field) return true;
  }
  return false;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("symq_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Settings, ParsesKeyValueLines) {
  std::istringstream in("# header\n\nnmax = 6   # trailing comment\n tau=0.825\nseed = 7\n");
  const auto s = parse_settings(in);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (std::pair<std::string, std::string>{"nmax", "6"}));
  EXPECT_EQ(s[1], (std::pair<std::string, std::string>{"tau", "0.825"}));
}

TEST(Settings, MalformedLineNamesLineNumber) {
  std::istringstream in("nmax = 6\njunk\n");
  try {
    parse_settings(in);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Settings, ErrorsNameTheKey) {
  ExperimentConfig c = defaults_for(Experiment::fig2);
  try {
    apply_setting(c, "tau", "fast");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_EQ(std::string(e.what()).rfind("tau:", 0), 0u);
  }
  EXPECT_THROW(apply_setting(c, "colour", "blue"), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "experiment", "fig3"), std::invalid_argument);
  EXPECT_NO_THROW(apply_setting(c, "sigma-rel", "0.1"));  // flags use dashes
}

TEST(Settings, Lists) {
  const auto s = parse_real_list("0.01:0.20:0.01");
  ASSERT_EQ(s.size(), 20u);
  EXPECT_EQ(s[5], 0.06);
  EXPECT_EQ(s.back(), 0.2);
  EXPECT_EQ(parse_int_list("1..30").size(), 30u);
  EXPECT_EQ(parse_int_list("1,2,3"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(parse_int_list("1..3,10"), (std::vector<int>{1, 2, 3, 10}));
  EXPECT_EQ(parse_real_list("0.5, 0.25"), (std::vector<double>{0.5, 0.25}));
  EXPECT_THROW(parse_int_list("5..1"), std::invalid_argument);
  EXPECT_THROW(parse_real_list("0.1:0.05:0.01"), std::invalid_argument);
}

TEST(Settings, FileThenFlagOverride) {
  const auto dir = scratch_dir("override");
  const auto file = dir / "fig2.conf";
  std::ofstream(file) << "experiment = fig2\nnmax = 6\ntau = 0.8\nseed = 7\n";
  ExperimentConfig c = defaults_for(Experiment::fig2);
  for (const auto& [k, v] : read_settings_file(file)) apply_setting(c, k, v);
  apply_setting(c, "tau", "0.825");
  EXPECT_DOUBLE_EQ(*c.tau, 0.825);
  EXPECT_EQ(*c.seed, 7u);
  // The echo keeps one entry per key, holding the final value.
  int tau_entries = 0;
  for (const auto& [k, v] : c.echo) {
    if (k == "tau") {
      ++tau_entries;
      EXPECT_EQ(v, "0.825");
    }
  }
  EXPECT_EQ(tau_entries, 1);
}

TEST(Validate, TauAtTrappingBoundWarns) {
  const auto ds = validate(configure(Experiment::fig2, {{"tau", "1.5707963267948966"}, {"nmax", "4"}, {"seed", "1"}}));
  EXPECT_TRUE(mentions(ds, Severity::warning, "tau"));
  EXPECT_FALSE(has_errors(ds));
}

TEST(Validate, TauBelowBoundIsClean) {
  EXPECT_TRUE(validate(configure(Experiment::fig2, {{"tau", "0.825"}, {"nmax", "6"}, {"seed", "1"}})).empty());
}

TEST(Validate, NegativeSigmaIsAnError) {
  const auto ds = validate(configure(Experiment::fig3, {{"sigma_rel", "-0.05"}, {"seed", "1"}}));
  EXPECT_TRUE(mentions(ds, Severity::error, "sigma_rel"));
}

TEST(Validate, OtherDiagnostics) {
  EXPECT_TRUE(mentions(validate(configure(Experiment::fig2, {})), Severity::error, "seed"));
  EXPECT_FALSE(has_errors(validate(configure(Experiment::fig3, {{"trials", "0"}}))));
  EXPECT_TRUE(mentions(validate(configure(Experiment::custom, {{"weights", "0,0.5,0.4"}, {"seed", "1"}})),
                       Severity::error, "weights"));
  EXPECT_TRUE(mentions(validate(configure(Experiment::custom, {{"weights", "0.5,0.5"}, {"seed", "1"}})),
                       Severity::error, "weights"));
  EXPECT_TRUE(mentions(validate(configure(Experiment::fig2, {{"nmax", "6,8"}, {"seed", "1"}})),
                       Severity::error, "nmax"));
  EXPECT_TRUE(mentions(validate(configure(Experiment::fig4, {{"cutoffs", "0,3"}, {"seed", "1"}})),
                       Severity::error, "cutoffs"));
  EXPECT_TRUE(mentions(validate(configure(Experiment::fig2, {{"gamma", "0"}, {"seed", "1"}})),
                       Severity::error, "gamma"));
  EXPECT_THROW(compute(configure(Experiment::fig2, {})), std::invalid_argument);
}

TEST(Fig3, SixtyRowsWithExactClosedForm) {
  const auto t = compute(configure(Experiment::fig3,
                                   {{"sigma_rel", "0.01:0.20:0.01"}, {"m", "1,2,3"}, {"trials", "2000"}, {"seed", "3"}}));
  ASSERT_EQ(t.rows.size(), 60u);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"m_rabi", "sigma_rel", "a_mean_closed", "a_mean_mc", "mc_stderr"}));
  for (const auto& row : t.rows) {
    const double closed = std::stod(row[2]);
    EXPECT_EQ(closed, symq::mean_atoms_rel(std::stoi(row[0]), std::stod(row[1])));
  }
  EXPECT_TRUE(check(t).empty());
}

TEST(Fig2, StepZeroIsBinomial) {
  const auto t = compute(configure(Experiment::fig2, {{"nmax", "6"}, {"tau", "0.825"}, {"seed", "7"}}));
  const auto b = symq::binomial_distribution(6);
  for (std::size_t n = 0; n <= 6; ++n) {
    EXPECT_EQ(t.rows[n][0], "0");
    EXPECT_EQ(std::stod(t.rows[n][2]), b[n]);
  }
  EXPECT_EQ(t.meta("tau"), "0.825");
  EXPECT_TRUE(check(t).empty());
}

TEST(Fig2, DefaultTauIsInitialOptimum) {
  const auto t = compute(configure(Experiment::fig2, {{"seed", "7"}}));
  EXPECT_NEAR(std::stod(*t.meta("tau")), 0.825, 0.005);
}

TEST(Custom, CarriesTauAndOutcome) {
  const auto t = compute(configure(Experiment::custom, {{"weights", "0,0.5,0.5"}, {"seed", "2"}, {"cutoff", "5"}}));
  EXPECT_EQ(t.columns.back(), "outcome");
  EXPECT_EQ(t.rows.front().back(), "initial");
  EXPECT_TRUE(check(t).empty());
}

TEST(Fig4, QualityRisesWithCutoff) {
  const auto t = compute(configure(Experiment::fig4, {{"nmax", "10"}, {"runs", "300"}, {"cutoffs", "1,30"}, {"seed", "1"}}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_LT(std::stod(t.rows[0][1]), std::stod(t.rows[1][1]));
  EXPECT_GT(std::stod(t.rows[1][1]), 0.99);
  EXPECT_TRUE(check(t).empty());
}

TEST(Output, BitIdenticalAcrossRunsAndThreadCounts) {
  const auto a = compute(configure(Experiment::fig4, {{"nmax", "6,10"}, {"runs", "100"}, {"cutoffs", "1..5"}, {"seed", "9"}, {"threads", "1"}}));
  const auto b = compute(configure(Experiment::fig4, {{"nmax", "6,10"}, {"runs", "100"}, {"cutoffs", "1..5"}, {"seed", "9"}, {"threads", "1"}}));
  const auto c = compute(configure(Experiment::fig4, {{"nmax", "6,10"}, {"runs", "100"}, {"cutoffs", "1..5"}, {"seed", "9"}, {"threads", "4"}}));
  EXPECT_EQ(render(a), render(b));
  EXPECT_EQ(a.rows, c.rows);
  const auto f1 = compute(configure(Experiment::fig3, {{"sigma_rel", "0.05,0.1"}, {"m", "1"}, {"trials", "5000"}, {"seed", "4"}}));
  const auto f2 = compute(configure(Experiment::fig3, {{"sigma_rel", "0.05,0.1"}, {"m", "1"}, {"trials", "5000"}, {"seed", "4"}}));
  EXPECT_EQ(render(f1), render(f2));
}

TEST(Output, RoundTripAndChecker) {
  const auto t = compute(configure(Experiment::fig3, {{"sigma_rel", "0.05:0.1:0.05"}, {"m", "1,2"}, {"trials", "0"}}));
  std::istringstream in(render(t));
  auto back = read_csv(in);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.metadata, t.metadata);
  EXPECT_TRUE(check(back).empty());
  back.rows[1][2] = "3.5";
  EXPECT_FALSE(check(back).empty());
}

TEST(Output, EnvironmentDirectoryAndUnwritablePath) {
  const auto dir = scratch_dir("env");
  ::setenv(kOutputDirEnv, dir.c_str(), 1);
  auto c = configure(Experiment::fig3, {{"sigma_rel", "0.1"}, {"m", "1"}, {"trials", "0"}});
  EXPECT_EQ(output_path(c), dir / "fig3.csv");
  const auto r = run_experiment(c);
  EXPECT_TRUE(fs::exists(dir / "fig3.csv"));
  EXPECT_EQ(r.rows, 1u);
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(output_path(c), fs::path(".") / "fig3.csv");

  std::ofstream(dir / "plain_file") << "x";
  apply_setting(c, "output", (dir / "plain_file" / "out.csv").string());
  EXPECT_THROW(run_experiment(c), std::runtime_error);
}
