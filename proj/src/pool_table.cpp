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

#include "oodkit/pool_table.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oodkit {

namespace {

const char* const kRequiredColumns[] = {"wd",       "aug",     "do",
                                        "adapt_lr", "pre_acc", "ft_acc"};

bool is_percent_column(const std::string& name) {
  auto ends_with = [&](const char* suffix) {
    const std::size_t n = std::char_traits<char>::length(suffix);
    return name.size() >= n && name.compare(name.size() - n, n, suffix) == 0;
  };
  return ends_with("_fpr") || ends_with("_acc") || ends_with("_auc");
}

double parse_number(const std::string& text, const std::string& column,
                    std::size_t row) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE) {
    throw std::runtime_error("unparsable number '" + text + "' in column '" +
                             column + "' at row " + std::to_string(row));
  }
  return value;
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw std::runtime_error("stray quote inside unquoted CSV field");
        }
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 >= text.size() || text[i + 1] != '\n') {
          throw std::runtime_error("bare carriage return in CSV input");
        }
        break;  // consumed by the following '\n'
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw std::runtime_error("unterminated quoted CSV field");
  // Final record without a trailing newline.
  if (!field.empty() || field_was_quoted || !record.empty()) end_record();
  return records;
}

std::string emit_csv(const std::vector<std::vector<std::string>>& records) {
  std::string out;
  for (const auto& record : records) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i > 0) out.push_back(',');
      const std::string& f = record[i];
      if (needs_quoting(f)) {
        out.push_back('"');
        for (char c : f) {
          if (c == '"') out.push_back('"');
          out.push_back(c);
        }
        out.push_back('"');
      } else {
        out.append(f);
      }
    }
    out.push_back('\n');
  }
  return out;
}

PoolTable::PoolTable(std::vector<std::string> columns,
                     std::vector<std::vector<std::string>> cells)
    : columns_(std::move(columns)), cells_(std::move(cells)) {
  for (std::size_t r = 0; r < cells_.size(); ++r) {
    if (cells_[r].size() != columns_.size()) {
      throw std::runtime_error("row " + std::to_string(r) + " has " +
                               std::to_string(cells_[r].size()) +
                               " fields, header has " +
                               std::to_string(columns_.size()));
    }
  }
}

bool PoolTable::has_column(const std::string& name) const {
  return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

std::size_t PoolTable::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) {
    throw std::invalid_argument("missing required column '" + name + "'");
  }
  return static_cast<std::size_t>(it - columns_.begin());
}

const std::string& PoolTable::cell(std::size_t row,
                                   const std::string& column) const {
  return cells_.at(row).at(column_index(column));
}

double PoolTable::number(std::size_t row, const std::string& column) const {
  return parse_number(cell(row, column), column, row);
}

std::vector<double> PoolTable::numeric_column(const std::string& column) const {
  std::vector<double> values;
  values.reserve(rows());
  const std::size_t col = column_index(column);
  for (std::size_t r = 0; r < rows(); ++r) {
    values.push_back(parse_number(cells_[r][col], column, r));
  }
  return values;
}

PoolTable parse_pool_table(const std::string& csv_text) {
  const auto records = parse_csv(csv_text);
  if (records.empty()) throw std::runtime_error("missing header");

  PoolTable table(records.front(),
                  {records.begin() + 1, records.end()});
  for (const char* required : kRequiredColumns) {
    table.column_index(required);  // throws "missing required column"
  }
  // Every column except the augmentation name is numeric; percentage columns
  // must be in range.
  for (const std::string& column : table.columns()) {
    if (column == "aug") continue;
    const std::vector<double> values = table.numeric_column(column);
    if (!is_percent_column(column)) continue;
    for (std::size_t r = 0; r < values.size(); ++r) {
      if (values[r] < 0.0 || values[r] > 100.0) {
        throw std::runtime_error("column '" + column + "' value " +
                                 table.cell(r, column) + " at row " +
                                 std::to_string(r) +
                                 " outside the percentage range [0, 100]");
      }
    }
  }
  return table;
}

PoolTable read_pool_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_pool_table(buffer.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::string emit_pool_table(const PoolTable& table) {
  std::vector<std::vector<std::string>> records;
  records.reserve(table.rows() + 1);
  records.push_back(table.columns());
  for (std::size_t r = 0; r < table.rows(); ++r) records.push_back(table.row(r));
  return emit_csv(records);
}

void write_pool_table(const PoolTable& table,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  out << emit_pool_table(table);
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace oodkit
