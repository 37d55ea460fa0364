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

#include <nlohmann/json.hpp>

#include "iongate/cli/config.hpp"
#include "iongate/cli/table.hpp"
#include "iongate/fidelity.hpp"
#include "iongate/hilbert.hpp"

namespace iongate::cli {

struct RunResult {
  TraceTable trace;
  nlohmann::json summary;
};

/// Observer times t_j = t_end j / (samples - 1).
std::vector<double> sample_times(const ScenarioConfig& config);

/// Initial motional distribution: thermal, or all weight on one Fock level.
hilbert::ThermalDistribution initial_distribution(const ScenarioConfig& config);

/// Evaluates the configured engine at every sample time. Numerical failures
/// surface as iongate::NumericalError.
RunResult run_scenario(const ScenarioConfig& config);

/// Budget for the configured trap, with n1 taken from the initial state.
fidelity::FidelityReport scenario_budget(const ScenarioConfig& config);

/// {carrier, lamb_dicke, spectator_direct, debye_waller, heating, total}.
nlohmann::json budget_json(const fidelity::FidelityReport& report);
Table budget_table(const fidelity::FidelityReport& report);

}  // namespace iongate::cli
