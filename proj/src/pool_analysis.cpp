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

#include "oodkit/pool_analysis.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oodkit {

double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kendall_tau_b needs equal-length sequences");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::invalid_argument("kendall_tau_b needs at least two points");
  }

  std::int64_t concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool tie_x = x[i] == x[j];
      const bool tie_y = y[i] == y[j];
      if (tie_x) ++ties_x;
      if (tie_y) ++ties_y;
      if (tie_x || tie_y) continue;
      const bool same_direction = (x[i] < x[j]) == (y[i] < y[j]);
      (same_direction ? concordant : discordant)++;
    }
  }
  const std::int64_t n0 =
      static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  if (ties_x == n0 || ties_y == n0) {
    throw std::invalid_argument(
        "kendall_tau_b is degenerate: one side is all ties");
  }
  // The tied-pair factors are converted to double before multiplying so the
  // product cannot overflow int64 for large n; sqrt of the product keeps
  // perfect squares (the tie-free case included) exact.
  return static_cast<double>(concordant - discordant) /
         std::sqrt(static_cast<double>(n0 - ties_x) *
                   static_cast<double>(n0 - ties_y));
}

namespace {

bool parse_double(const std::string& text, double* out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) return false;
  *out = value;
  return true;
}

// Numeric equality when both sides parse; otherwise exact text match.
bool cell_matches(const std::string& cell, const std::string& wanted) {
  double a = 0.0, b = 0.0;
  if (parse_double(cell, &a) && parse_double(wanted, &b)) return a == b;
  return cell == wanted;
}

}  // namespace

PoolTable filter_rows(
    const PoolTable& table,
    const std::vector<std::pair<std::string, std::string>>& predicates) {
  std::vector<std::size_t> column_of;
  column_of.reserve(predicates.size());
  for (const auto& [column, value] : predicates) {
    column_of.push_back(table.column_index(column));  // throws on unknown
  }

  std::vector<std::vector<std::string>> kept;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool matches = true;
    for (std::size_t p = 0; p < predicates.size(); ++p) {
      if (!cell_matches(table.row(r)[column_of[p]], predicates[p].second)) {
        matches = false;
        break;
      }
    }
    if (matches) kept.push_back(table.row(r));
  }
  return PoolTable(table.columns(), std::move(kept));
}

std::vector<GroupRow> group_summary(const PoolTable& table,
                                    const std::vector<std::string>& group_by,
                                    const std::vector<std::string>& metrics) {
  std::vector<std::size_t> key_cols;
  for (const auto& column : group_by) {
    key_cols.push_back(table.column_index(column));
  }
  // Metric values parsed up front so a bad cell fails before partial output.
  std::vector<std::vector<double>> metric_values;
  for (const auto& column : metrics) {
    metric_values.push_back(table.numeric_column(column));
  }

  std::vector<GroupRow> groups;
  std::map<std::vector<std::string>, std::size_t> index_of;
  std::vector<std::vector<std::vector<double>>> samples;  // group x metric x row
  for (std::size_t r = 0; r < table.rows(); ++r) {
    std::vector<std::string> key;
    key.reserve(key_cols.size());
    for (std::size_t c : key_cols) key.push_back(table.row(r)[c]);

    auto [it, inserted] = index_of.try_emplace(key, groups.size());
    if (inserted) {
      GroupRow row;
      row.key = key;
      groups.push_back(std::move(row));
      samples.emplace_back(metrics.size());
    }
    GroupRow& group = groups[it->second];
    ++group.count;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      samples[it->second][m].push_back(metric_values[m][r]);
    }
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      const std::vector<double>& values = samples[g][m];
      MetricSummary summary;
      summary.min = *std::min_element(values.begin(), values.end());
      summary.max = *std::max_element(values.begin(), values.end());
      double sum = 0.0;
      for (double v : values) sum += v;
      summary.mean = sum / static_cast<double>(values.size());
      groups[g].metrics.push_back(summary);
    }
  }
  return groups;
}

std::string report_json(const PoolTable& table, const ReportSpec& spec) {
  const PoolTable filtered = filter_rows(table, spec.filters);

  nlohmann::json j;
  j["n_rows"] = filtered.rows();
  nlohmann::json filters = nlohmann::json::array();
  for (const auto& [column, value] : spec.filters) {
    filters.push_back({{"column", column}, {"value", value}});
  }
  j["filters"] = filters;

  nlohmann::json correlations = nlohmann::json::array();
  for (const auto& [x, y] : spec.correlations) {
    correlations.push_back({{"x", x},
                            {"y", y},
                            {"n", filtered.rows()},
                            {"tau_b", kendall_tau_b(filtered.numeric_column(x),
                                                    filtered.numeric_column(y))}});
  }
  j["correlations"] = correlations;

  if (!spec.group_by.empty()) {
    nlohmann::json groups = nlohmann::json::array();
    for (const GroupRow& row :
         group_summary(filtered, spec.group_by, spec.metrics)) {
      nlohmann::json group;
      nlohmann::json key = nlohmann::json::object();
      for (std::size_t c = 0; c < spec.group_by.size(); ++c) {
        key[spec.group_by[c]] = row.key[c];
      }
      group["key"] = key;
      group["count"] = row.count;
      nlohmann::json metric_block = nlohmann::json::object();
      for (std::size_t m = 0; m < spec.metrics.size(); ++m) {
        metric_block[spec.metrics[m]] = {{"mean", row.metrics[m].mean},
                                         {"min", row.metrics[m].min},
                                         {"max", row.metrics[m].max}};
      }
      group["metrics"] = metric_block;
      groups.push_back(group);
    }
    j["groups"] = groups;
  }

  nlohmann::json scatter_files = nlohmann::json::array();
  for (const ScatterSpec& scatter : spec.scatters) {
    scatter_files.push_back("scatter_" + scatter.x + "_vs_" + scatter.y +
                            ".csv");
  }
  j["scatter_files"] = scatter_files;
  return j.dump(2) + "\n";
}

void emit_report(const PoolTable& table, const ReportSpec& spec,
                 const std::filesystem::path& destination) {
  std::filesystem::create_directories(destination);
  const PoolTable filtered = filter_rows(table, spec.filters);

  auto write_file = [](const std::filesystem::path& path,
                       const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + path.string() +
                               "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
      throw std::runtime_error("write failed for '" + path.string() + "'");
    }
  };

  write_file(destination / "report.json", report_json(table, spec));

  for (const ScatterSpec& scatter : spec.scatters) {
    std::vector<std::vector<std::string>> records;
    records.push_back({scatter.x, scatter.y, scatter.key});
    const std::size_t x_col = filtered.column_index(scatter.x);
    const std::size_t y_col = filtered.column_index(scatter.y);
    const std::size_t key_col = filtered.column_index(scatter.key);
    for (std::size_t r = 0; r < filtered.rows(); ++r) {
      records.push_back({filtered.row(r)[x_col], filtered.row(r)[y_col],
                         filtered.row(r)[key_col]});
    }
    write_file(destination /
                   ("scatter_" + scatter.x + "_vs_" + scatter.y + ".csv"),
               emit_csv(records));
  }
}

}  // namespace oodkit
