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

#include "iongate/cli/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "iongate/cli/config.hpp"
#include "iongate/cli/reproduce.hpp"
#include "iongate/cli/scenario.hpp"
#include "iongate/common.hpp"
#include "iongate/fidelity.hpp"

namespace iongate::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string output_dir(const std::string& requested) {
  if (const char* env = std::getenv("IONGATE_OUT"); env && *env) return env;
  return requested.empty() ? "out" : requested;
}

namespace {

fs::path prepare(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
  const ScenarioConfig c = load_config(config_path);
  const RunResult res = run_scenario(c);
  const fs::path dir = prepare(output_dir(out_dir));
  res.trace.write_csv((dir / (c.name + ".csv")).string());
  write_json(dir / (c.name + "_summary.json"), res.summary);
  out << (dir / (c.name + ".csv")).string() << '\n'
      << (dir / (c.name + "_summary.json")).string() << '\n';
  return kOk;
}

int cmd_budget(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
  const ScenarioConfig c = load_config(config_path);
  if (c.loops == 0) throw ConfigError("schedule.loops", "the budget needs a loop count");
  const auto report = scenario_budget(c);
  const fs::path dir = prepare(output_dir(out_dir));
  write_json(dir / (c.name + "_budget.json"), budget_json(report));
  budget_table(report).write_csv((dir / (c.name + "_budget.csv")).string());
  for (const auto& t : report.terms())
    out << t.key << "  " << format_number(t.loss) << "  " << t.formula << '\n';
  out << "total  " << format_number(report.total) << '\n';
  return kOk;
}

int cmd_reproduce(const std::string& target, const std::string& out_dir, std::ostream& out) {
  std::vector<std::string> targets;
  if (target == "all")
    targets = reproduce_targets();
  else
    targets.push_back(target);
  const fs::path dir = prepare(output_dir(out_dir));
  for (const auto& name : targets) {
    const Reproduction r = reproduce(name);
    for (const auto& [stem, table] : r.tables) {
      table.write_csv((dir / (stem + ".csv")).string());
      out << (dir / (stem + ".csv")).string() << '\n';
    }
    write_json(dir / (name + "_summary.json"), r.summary);
    out << (dir / (name + "_summary.json")).string() << '\n';
  }
  return kOk;
}

int cmd_modes(int ions, const std::string& out_dir, std::ostream& out) {
  const Table spectrum = modes_table(ions);
  const Table sums = sums_table(ions);
  const fs::path dir = prepare(output_dir(out_dir));
  const std::string stem = "modes_" + std::to_string(ions);
  spectrum.write_csv((dir / (stem + ".csv")).string());
  sums.write_csv((dir / (stem + "_sums.csv")).string());
  spectrum.write_csv(out);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bichromatic entangling-gate simulator for trapped ions", "iongate"};
  app.require_subcommand(1);
  std::string config_path, out_dir, target;
  int ions = 2;

  auto* run = app.add_subcommand("run", "Run a scenario from a JSON config");
  run->add_option("config", config_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory");

  auto* rep = app.add_subcommand("reproduce", "Emit the data behind a figure or table");
  std::vector<std::string> choices = reproduce_targets();
  choices.push_back("all");
  rep->add_option("target", target, "Target name")->required()->check(CLI::IsMember(choices));
  rep->add_option("--out", out_dir, "Output directory");

  auto* bud = app.add_subcommand("budget", "Itemized fidelity budget for a config");
  bud->add_option("config", config_path, "Scenario JSON file")->required();
  bud->add_option("--out", out_dir, "Output directory");

  auto* mod = app.add_subcommand("modes", "Normal modes and mode sums of an ion string");
  mod->add_option("--ions", ions, "Number of ions")->required()->check(CLI::Range(2, 10));
  mod->add_option("--out", out_dir, "Output directory");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, out);
    if (*bud) return cmd_budget(config_path, out_dir, out);
    if (*rep) return cmd_reproduce(target, out_dir, out);
    if (*mod) return cmd_modes(ions, out_dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fidelity::InconsistentInput& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace iongate::cli
