// Copyright 2026 The oodkit Authors
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

#ifndef OODKIT_POOL_TABLE_HPP_
#define OODKIT_POOL_TABLE_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace oodkit {

// A model-pool results table: one row per trained model, columns for the
// training hyperparameters (wd, aug, do, adapt_lr, pre_acc, ft_acc) plus one
// metric triple per detector. Cells are kept verbatim as text so that
// parse -> emit -> parse is the identity; numeric access parses on demand.
//
// Columns ending in `_fpr`, `_acc`, or `_auc` are percentages and must lie in
// [0, 100]; this is checked at load time.
class PoolTable {
 public:
  PoolTable() = default;
  PoolTable(std::vector<std::string> columns,
            std::vector<std::vector<std::string>> cells);

  std::size_t rows() const { return cells_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  bool has_column(const std::string& name) const;
  // Throws std::invalid_argument("missing required column '<name>'").
  std::size_t column_index(const std::string& name) const;

  const std::string& cell(std::size_t row, const std::string& column) const;
  // Parses the cell as a floating-point number; throws std::runtime_error
  // ("unparsable number ...") when the text is not fully numeric.
  double number(std::size_t row, const std::string& column) const;
  std::vector<double> numeric_column(const std::string& column) const;

  const std::vector<std::string>& row(std::size_t index) const {
    return cells_.at(index);
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> cells_;
};

// Strict RFC-4180: comma separator, optional double-quote quoting with "" as
// the embedded-quote escape, LF or CRLF record ends. The final record may omit
// the trailing newline.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string emit_csv(const std::vector<std::vector<std::string>>& records);

// Parses and validates a pool table: the required hyperparameter columns must
// be present, every column except `aug` must be numeric, and percentage
// columns must lie in [0, 100].
PoolTable parse_pool_table(const std::string& csv_text);
PoolTable read_pool_table(const std::filesystem::path& path);

std::string emit_pool_table(const PoolTable& table);
void write_pool_table(const PoolTable& table, const std::filesystem::path& path);

}  // namespace oodkit

#endif  // OODKIT_POOL_TABLE_HPP_
