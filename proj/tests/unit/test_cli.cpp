// Copyright 2026 The iongate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "iongate/analytic.hpp"
#include "iongate/cli/app.hpp"
#include "iongate/cli/config.hpp"
#include "iongate/cli/reproduce.hpp"
#include "iongate/cli/scenario.hpp"

namespace iongate::cli {
namespace {

using nlohmann::json;

json base_doc() {
  return json::parse(R"({
    "name": "probe",
    "trap": {
      "ions": 2,
      "trap_freq": {"nu_units": 1},
      "detuning": {"nu_units": 0.95},
      "rabi_freq": {"nu_units": 0.177},
      "lamb_dicke": 0.1
    },
    "schedule": {"loops": 2},
    "initial": {"thermal": 2},
    "engine": "analytic",
    "outputs": ["density_elements", "epr"],
    "sampling": {"samples": 41}
  })");
}

std::string where_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "<accepted>";
}

std::string config_path(const std::string& name) {
  return std::string(IONGATE_CONFIG_DIR) + "/" + name;
}

TEST(Config, RejectsUnknownKeysWithTheirPath) {
  json d = base_doc();
  d["trap"]["detunning"] = {{"nu_units", 0.9}};
  EXPECT_EQ(where_of(d), "trap.detunning");
  d = base_doc();
  d["colour"] = "red";
  EXPECT_EQ(where_of(d), "colour");
}

TEST(Config, FrequencyNeedsExactlyOneUnit) {
  json d = base_doc();
  d["trap"]["detuning"] = {{"nu_units", 0.95}, {"hz", 950000}};
  EXPECT_EQ(where_of(d), "trap.detuning");
  d["trap"]["detuning"] = json::object();
  EXPECT_EQ(where_of(d), "trap.detuning");
}

TEST(Config, HzNeedsAPhysicalTrapFrequency) {
  json d = base_doc();
  d["trap"]["detuning"] = {{"hz", 950000}};
  EXPECT_EQ(where_of(d).rfind("trap.detuning", 0), 0u) << where_of(d);
  d = base_doc();
  d["trap"]["trap_freq"] = {{"nu_units", 2}};
  EXPECT_EQ(where_of(d).rfind("trap.trap_freq", 0), 0u) << where_of(d);
}

TEST(Config, MalformedJsonReportsLineAndColumn) {
  try {
    parse_config_text("{\n  \"name\": \"x\",\n  \"trap\": {,}\n}");
    FAIL() << "accepted malformed text";
  } catch (const ConfigError& e) {
    EXPECT_NE(e.where().find("line 3"), std::string::npos) << e.where();
    EXPECT_NE(e.where().find("column"), std::string::npos) << e.where();
  }
}

TEST(Config, ObservableConstraints) {
  json d = base_doc();
  d["trap"]["ions"] = 3;
  EXPECT_NE(where_of(d), "<accepted>");  // epr is two-ion only
  d = base_doc();
  d["schedule"] = {{"duration", {{"nu_units", 100.0}}}};
  d["outputs"] = {"budget"};
  EXPECT_NE(where_of(d), "<accepted>");
  d = base_doc();
  d["trap"]["detuning"] = {{"nu_units", 1.2}};
  EXPECT_EQ(where_of(d), "trap");
}

TEST(Config, HzAndNormalizedUnitsAgree) {
  const ScenarioConfig a = load_config(config_path("fig3b_rwa_hz.json"));
  json d = base_doc();
  d["engine"] = "rwa";
  d["sampling"]["samples"] = 201;
  const ScenarioConfig b = parse_config(d);
  EXPECT_TRUE(a.physical);
  EXPECT_NEAR(a.trap.detuning, b.trap.detuning, 1e-12);
  EXPECT_NEAR(a.trap.rabi_freq, b.trap.rabi_freq, 1e-12);
  EXPECT_NEAR(a.duration, b.duration, 1e-12 * b.duration);
  EXPECT_EQ(a.trap_hz, 1e6);
  json s = base_doc();
  s["schedule"] = {{"duration", {{"seconds", 40e-6}}}};
  s["trap"]["trap_freq"] = {{"hz", 1e6}};
  s["trap"]["detuning"] = {{"hz", 950000}};
  s["trap"]["rabi_freq"] = {{"hz", 177000}};
  EXPECT_NEAR(parse_config(s).duration, 40e-6 * 2.0 * kPi * 1e6, 1e-9);
}

TEST(Config, RoundTripsThroughCanonicalForm) {
  for (const char* name :
       {"fig3b_analytic.json", "fig3b_rwa_hz.json", "heating_lindblad.json", "n4_budget.json"}) {
    const ScenarioConfig c = load_config(config_path(name));
    const json once = to_json(c);
    EXPECT_EQ(to_json(parse_config(once)), once) << name;
  }
}

TEST(Table, CsvFormat) {
  Table t({"a", "b"});
  t.add_row({0.1, -0.0});
  EXPECT_EQ(t.csv(), "a,b\n0.10000000000000001,0\n");
  EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Scenario, RunsAreDeterministic) {
  const ScenarioConfig c = parse_config(base_doc());
  EXPECT_EQ(run_scenario(c).trace.csv(), run_scenario(c).trace.csv());
}

TEST(Scenario, NoFieldLeavesPopulationsAlone) {
  json d = base_doc();
  d["schedule"] = {{"duration", {{"nu_units", 50.0}}}};
  d["trap"]["rabi_freq"] = {{"nu_units", 0.0}};
  d["engine"] = "rwa";
  const auto r = run_scenario(parse_config(d));
  for (std::size_t i = 0; i < r.trace.rows(); ++i) {
    EXPECT_NEAR(r.trace.at(i, "rho_gg_gg"), 1.0, 1e-12);
    EXPECT_NEAR(r.trace.at(i, "rho_ee_ee"), 0.0, 1e-12);
  }
}

TEST(Scenario, FigThreeBGateReachesTheBellState) {
  const auto r = run_scenario(load_config(config_path("fig3b_analytic.json")));
  const auto& last = r.trace.row(r.trace.rows() - 1);
  EXPECT_NEAR(last[0], 251.327, 1e-3);
  EXPECT_GT(r.summary["final"]["epr_population"].get<double>(), 0.995);
  EXPECT_NEAR(r.summary["final"]["rho_gg_gg"].get<double>(), 0.5, 5e-3);
  EXPECT_NEAR(r.trace.at(r.trace.rows() - 1, "seconds"), last[0] / (2.0 * kPi * 1e6), 1e-18);
  EXPECT_EQ(r.summary["rows"].get<std::size_t>(), r.trace.rows());
  EXPECT_TRUE(r.summary.contains("budget"));
}

TEST(Budget, JsonHasExactlySixKeys) {
  const auto c = load_config(config_path("fig3b_analytic.json"));
  const json b = budget_json(scenario_budget(c));
  EXPECT_EQ(b.size(), 6u);
  for (const char* k :
       {"carrier", "lamb_dicke", "spectator_direct", "debye_waller", "heating", "total"})
    EXPECT_TRUE(b.contains(k)) << k;
  EXPECT_NEAR(b["carrier"].get<double>(), 0.0347, 5e-4);
  EXPECT_EQ(b["heating"].get<double>(), 0.0);
}

TEST(Budget, LossFreeChannelsGiveUnitTotal) {
  json d = base_doc();
  d["outputs"] = {"budget"};
  d["budget_channels"] = {{"carrier", false},      {"lamb_dicke", false},
                          {"spectator_direct", false}, {"debye_waller", false},
                          {"heating", false}};
  EXPECT_EQ(budget_json(scenario_budget(parse_config(d)))["total"].get<double>(), 1.0);
}

TEST(Reproduce, TableOneAndFigureSix) {
  const auto t1 = reproduce("table1");
  ASSERT_EQ(t1.tables.size(), 1u);
  const Table& t = t1.tables[0].second;
  EXPECT_EQ(t.rows(), 9u);
  bool found = false;
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (std::abs(t.at(i, "gate_time_us") - 50.0) < 1e-9) found = true;
  EXPECT_TRUE(found);

  const Table s = sums_table(5);
  auto sigma = [&](int k) { return s.at(static_cast<std::size_t>(k - 1), "sigma"); };
  EXPECT_GT(sigma(4), sigma(3));
  EXPECT_GT(sigma(3), sigma(1));
  EXPECT_GT(sigma(1), sigma(2));
  EXPECT_GT(sigma(2), sigma(6));
  EXPECT_GT(sigma(6), sigma(5));
  EXPECT_THROW(reproduce("fig99"), std::invalid_argument);
}

class CliExit : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("iongate_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
    unsetenv("IONGATE_OUT");
  }
  void TearDown() override {
    unsetenv("IONGATE_OUT");
    std::filesystem::remove_all(dir_);
  }
  std::string write(const std::string& name, const json& doc) {
    const auto p = dir_ / name;
    std::ofstream(p) << doc.dump(2);
    return p.string();
  }
  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  std::filesystem::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliExit, RunWritesTraceAndSummary) {
  const auto cfg = write("probe.json", base_doc());
  EXPECT_EQ(run({"run", cfg, "--out", dir_.string()}), kOk) << err_.str();
  EXPECT_TRUE(std::filesystem::exists(dir_ / "probe.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "probe_summary.json"));
}

TEST_F(CliExit, EnvironmentOverridesOutDirectory) {
  const auto cfg = write("probe.json", base_doc());
  const auto env = dir_ / "env";
  setenv("IONGATE_OUT", env.c_str(), 1);
  EXPECT_EQ(output_dir("elsewhere"), env.string());
  EXPECT_EQ(run({"run", cfg, "--out", (dir_ / "flag").string()}), kOk) << err_.str();
  EXPECT_TRUE(std::filesystem::exists(env / "probe.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir_ / "flag" / "probe.csv"));
  unsetenv("IONGATE_OUT");
  EXPECT_EQ(output_dir(""), "out");
  EXPECT_EQ(output_dir("x"), "x");
}

TEST_F(CliExit, ConfigErrorsExitTwo) {
  json d = base_doc();
  d["trap"]["bogus"] = 1;
  EXPECT_EQ(run({"run", write("bad.json", d), "--out", dir_.string()}), kConfigError);
  EXPECT_NE(err_.str().find("trap.bogus"), std::string::npos) << err_.str();
  EXPECT_EQ(run({"run", (dir_ / "missing.json").string()}), kConfigError);
  json off = base_doc();
  off["trap"]["rabi_freq"] = {{"nu_units", 0.1}};
  off["outputs"] = {"budget"};
  EXPECT_EQ(run({"budget", write("off.json", off), "--out", dir_.string()}), kConfigError);
}

TEST_F(CliExit, NumericalFailureExitsThree) {
  json d = base_doc();
  d["trap"]["ions"] = 3;
  d["initial"] = {{"thermal", 0}};
  d["outputs"] = {"ghz_fidelity"};
  d["numerics"] = {{"cutoff", 3}};
  EXPECT_EQ(run({"run", write("trunc.json", d), "--out", dir_.string()}), kNumericalError)
      << err_.str();
}

TEST_F(CliExit, UsageErrorsExitOne) {
  EXPECT_EQ(run({}), kUsage);
  EXPECT_EQ(run({"modes", "--ions", "11"}), kUsage);
  EXPECT_EQ(run({"reproduce", "nonsense", "--out", dir_.string()}), kUsage);
}

TEST_F(CliExit, ModesAndBudgetCommands) {
  EXPECT_EQ(run({"modes", "--ions", "3", "--out", dir_.string()}), kOk) << err_.str();
  EXPECT_TRUE(std::filesystem::exists(dir_ / "modes_3.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "modes_3_sums.csv"));
  EXPECT_EQ(run({"budget", config_path("n4_budget.json"), "--out", dir_.string()}), kOk)
      << err_.str();
  EXPECT_NE(out_.str().find("heating"), std::string::npos);
}

}  // namespace
}  // namespace iongate::cli
