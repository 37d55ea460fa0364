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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iongate/common.hpp"
#include "iongate/dynamics.hpp"
#include "iongate/fidelity.hpp"

namespace iongate::cli {

/// Raised for anything wrong with a scenario document. `where` names the
/// offending field ("trap.detuning") or a "line N, column M" location.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

enum class Engine { Analytic, Rwa, Full, Lindblad };
enum class Observable { DensityElements, Epr, GhzFidelity, Trajectory, Budget };

std::string to_string(Engine e);
std::string to_string(Observable o);

struct InitialState {
  enum class Kind { Thermal, Fock };
  Kind kind = Kind::Thermal;
  double mean_n = 0.0;  // thermal
  int level = 0;        // Fock
};

/// A fully validated scenario, every frequency in units of nu.
struct ScenarioConfig {
  std::string name = "scenario";
  TrapParams trap;
  double trap_hz = 1e6;    // nu / 2pi, used for the seconds column
  bool physical = false;   // true when the document used hz / seconds

  int loops = 0;           // K; 0 when an explicit duration was given
  double duration = 0.0;   // tau in 1/nu
  InitialState initial;
  Engine engine = Engine::Analytic;
  dynamics::Variant lindblad_variant = dynamics::Variant::XP;
  std::optional<dynamics::HeatingParams> heating;
  std::vector<Observable> outputs;

  int samples = 400;       // rows, both endpoints included
  double t_end = 0.0;      // defaults to the duration
  double ensemble_tail = 1e-8;
  int cutoff = 0;          // 0 picks the cutoff automatically
  fidelity::BudgetOptions budget;

  bool wants(Observable o) const;
};

/// Parses and validates a JSON document. Unknown keys are rejected.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Canonical document in normalized units; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace iongate::cli
