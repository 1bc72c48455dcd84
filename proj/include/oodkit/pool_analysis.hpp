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

#ifndef OODKIT_POOL_ANALYSIS_HPP_
#define OODKIT_POOL_ANALYSIS_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "oodkit/pool_table.hpp"

namespace oodkit {

// Tie-corrected Kendall rank correlation:
//   tau_b = (C - D) / sqrt((n0 - n1) (n0 - n2))
// with n0 = n(n-1)/2 and n1/n2 the tied-pair counts in x/y. Pair counts are
// exact integers. Throws on length mismatch, n < 2, or an all-ties side.
double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

// Keeps rows where every predicate column equals its value (numeric equality
// when both sides parse as numbers, else exact text). Row order preserved;
// an unknown column throws.
PoolTable filter_rows(
    const PoolTable& table,
    const std::vector<std::pair<std::string, std::string>>& predicates);

struct MetricSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct GroupRow {
  std::vector<std::string> key;  // group-by column values, in column order
  std::size_t count = 0;
  // Parallel to the metric column list passed in.
  std::vector<MetricSummary> metrics;
};

// Groups rows by the tuple of group-by cells (first-appearance order) and
// summarizes each metric column per group.
std::vector<GroupRow> group_summary(const PoolTable& table,
                                    const std::vector<std::string>& group_by,
                                    const std::vector<std::string>& metrics);

struct ScatterSpec {
  std::string x;
  std::string y;
  std::string key;  // series key column
};

struct ReportSpec {
  std::vector<std::pair<std::string, std::string>> filters;
  std::vector<std::pair<std::string, std::string>> correlations;  // x, y
  std::vector<std::string> group_by;
  std::vector<std::string> metrics;
  std::vector<ScatterSpec> scatters;
};

// The report body as canonical JSON (filters applied first; correlations
// carry n and the filters; groups as above). Byte-deterministic.
std::string report_json(const PoolTable& table, const ReportSpec& spec);

// Writes report.json plus one scatter_<x>_vs_<y>.csv per scatter spec into
// the destination directory.
void emit_report(const PoolTable& table, const ReportSpec& spec,
                 const std::filesystem::path& destination);

}  // namespace oodkit

#endif  // OODKIT_POOL_ANALYSIS_HPP_
