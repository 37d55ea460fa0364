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

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "iongate/cli/table.hpp"

namespace iongate::cli {

/// Data behind one figure or table: named CSV tables plus a JSON summary
/// with the parameters and headline numbers.
struct Reproduction {
  std::string target;
  std::vector<std::pair<std::string, Table>> tables;  // file stem, data
  nlohmann::json summary;
};

const std::vector<std::string>& reproduce_targets();

/// Throws std::invalid_argument for an unknown target.
Reproduction reproduce(const std::string& target);

Reproduction reproduce_table1();
Reproduction reproduce_table2();
Reproduction reproduce_fig3a();
Reproduction reproduce_fig3b();
Reproduction reproduce_fig4();
Reproduction reproduce_fig5();
Reproduction reproduce_fig6();

/// Spectrum table (mode, freq, b_1 ... b_N) and the six sums for N ions.
Table modes_table(int n_ions);
Table sums_table(int n_ions);

}  // namespace iongate::cli
