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

#include "iongate/cli/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "iongate/common.hpp"

namespace iongate::cli {

std::string format_number(double x) {
  if (x == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("table needs at least one column");
  for (const auto& c : columns_)
    if (c.empty() || c.find_first_of(",\"\n\r") != std::string::npos)
      throw std::invalid_argument("bad column name '" + c + "'");
}

double Table::at(std::size_t row, const std::string& column) const {
  const auto it = std::find(columns_.begin(), columns_.end(), column);
  if (it == columns_.end()) throw std::out_of_range("no column '" + column + "'");
  return data_.at(row)[static_cast<std::size_t>(it - columns_.begin())];
}

void Table::add_row(std::vector<double> cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("row has " + std::to_string(cells.size()) + " cells, table has " +
                                std::to_string(columns_.size()) + " columns");
  data_.push_back(std::move(cells));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& r : data_) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
    out << '\n';
  }
}

void Table::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out);
}

std::string Table::csv() const {
  std::ostringstream ss;
  write_csv(ss);
  return ss.str();
}

namespace {

std::vector<std::string> trace_columns(const std::vector<std::string>& observables) {
  std::vector<std::string> cols{"nu_t", "seconds"};
  cols.insert(cols.end(), observables.begin(), observables.end());
  return cols;
}

}  // namespace

TraceTable::TraceTable(const std::vector<std::string>& observables, double trap_hz)
    : Table(trace_columns(observables)), trap_hz_(trap_hz) {
  if (!(trap_hz > 0.0)) throw std::invalid_argument("trap_hz must be positive");
}

void TraceTable::add_sample(double nu_t, const std::vector<double>& values) {
  std::vector<double> row{nu_t, nu_t / (2.0 * kPi * trap_hz_)};
  row.insert(row.end(), values.begin(), values.end());
  add_row(std::move(row));
}

}  // namespace iongate::cli
