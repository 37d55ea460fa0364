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

#include <iosfwd>
#include <string>
#include <vector>

namespace iongate::cli {

/// Rectangular numeric table written as CSV: comma separated, header row,
/// 17 significant digits, LF line endings.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t rows() const noexcept { return data_.size(); }
  const std::vector<double>& row(std::size_t i) const { return data_.at(i); }
  double at(std::size_t row, const std::string& column) const;

  /// Throws std::invalid_argument unless the row has one cell per column.
  void add_row(std::vector<double> cells);

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
  std::string csv() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> data_;
};

/// A time series: the first two columns are always nu_t and seconds.
class TraceTable : public Table {
 public:
  TraceTable(const std::vector<std::string>& observables, double trap_hz);

  void add_sample(double nu_t, const std::vector<double>& values);

 private:
  double trap_hz_;
};

/// %.17g, so a value read back is bit-identical.
std::string format_number(double x);

}  // namespace iongate::cli
