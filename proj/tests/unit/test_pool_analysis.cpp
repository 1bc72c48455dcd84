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

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "oodkit/pool_analysis.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace oodkit;
using testutil::TempDir;

namespace {

std::filesystem::path data_dir() { return OODKIT_DATA_DIR; }

PoolTable table3() { return read_pool_table(data_dir() / "table3.csv"); }

}  // namespace

TEST_CASE("kendall_tau_b on perfectly ordered sequences") {
  CHECK(kendall_tau_b({1, 2, 3}, {2, 4, 6}) == 1.0);
  CHECK(kendall_tau_b({1, 2, 3}, {6, 4, 2}) == -1.0);
  CHECK(kendall_tau_b({1, 2, 3, 4}, {1, 1, 2, 2}) == doctest::Approx(0.8164965809).epsilon(1e-9));
}

TEST_CASE("kendall_tau_b argument validation") {
  CHECK_THROWS_WITH_AS(kendall_tau_b({1, 2}, {1, 2, 3}),
                       doctest::Contains("equal-length"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(kendall_tau_b({1}, {1}),
                       doctest::Contains("at least two"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(kendall_tau_b({5, 5, 5}, {1, 2, 3}),
                       doctest::Contains("all ties"), std::invalid_argument);
}

TEST_CASE("kendall_tau_b equals the tie-group formula on random data") {
  std::mt19937 gen(424242);
  std::uniform_int_distribution<int> value_pick(0, 9);  // many ties
  std::uniform_int_distribution<int> size_pick(2, 120);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size_pick(gen);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = value_pick(gen);
      y[i] = value_pick(gen);
    }
    // Skip degenerate draws where one side is constant.
    const bool x_const = std::equal(x.begin() + 1, x.end(), x.begin());
    const bool y_const = std::equal(y.begin() + 1, y.end(), y.begin());
    if (x_const || y_const) continue;
    CHECK(std::abs(kendall_tau_b(x, y) - oracle::tau_b_group_formula(x, y)) <=
          1e-12);
  }
}

TEST_CASE("tau_b antisymmetry and monotone invariance") {
  std::mt19937 gen(9000);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) {
      x[i] = unif(gen);
      y[i] = unif(gen);
    }
    const double tau = kendall_tau_b(x, y);
    std::vector<double> neg_y(30), exp_x(30);
    for (int i = 0; i < 30; ++i) {
      neg_y[i] = -y[i];
      exp_x[i] = std::exp(x[i] / 3.0);
    }
    CHECK(kendall_tau_b(x, neg_y) == doctest::Approx(-tau).epsilon(1e-12));
    CHECK(kendall_tau_b(exp_x, y) == doctest::Approx(tau).epsilon(1e-12));
  }
}

TEST_CASE("the fixture subset correlation matches its exact rational value") {
  const PoolTable subset =
      filter_rows(table3(), {{"wd", "0.1"}, {"adapt_lr", "0.01"}});
  REQUIRE(subset.rows() == 14);
  const std::vector<double> x = subset.numeric_column("pre_acc");
  const std::vector<double> y = subset.numeric_column("maha_ninco_fpr");
  const double tau = kendall_tau_b(x, y);
  CHECK(tau == doctest::Approx(-57.0 / 90.0).epsilon(1e-12));
  CHECK(tau <= -0.55);
  CHECK(std::abs(tau - oracle::tau_b_group_formula(x, y)) <= 1e-15);
}

TEST_CASE("filter_rows matches numerically when both sides parse") {
  const PoolTable t3 = table3();
  // "0.10" equals "0.1" numerically even though the text differs.
  const PoolTable a = filter_rows(t3, {{"wd", "0.10"}});
  const PoolTable b = filter_rows(t3, {{"wd", "0.1"}});
  CHECK(a.rows() == b.rows());
  CHECK(a.rows() > 0);

  const PoolTable text_match = filter_rows(t3, {{"aug", "medium1"}});
  CHECK(text_match.rows() > 0);
  for (std::size_t r = 0; r < text_match.rows(); ++r) {
    CHECK(text_match.cell(r, "aug") == "medium1");
  }

  CHECK(filter_rows(t3, {}).rows() == t3.rows());  // no predicates: identity
  CHECK_THROWS_AS(filter_rows(t3, {{"nope", "1"}}), std::invalid_argument);
  CHECK(filter_rows(t3, {{"aug", "no-such-level"}}).rows() == 0);
}

TEST_CASE("group_summary partitions the pool and summarizes metrics") {
  const PoolTable t3 = table3();
  const auto groups = group_summary(t3, {"adapt_lr"}, {"ft_acc"});
  REQUIRE(groups.size() == 2);  // two adaptation learning rates, 27 rows each
  CHECK(groups[0].count == 27);
  CHECK(groups[1].count == 27);
  // First-appearance order: 0.03 appears in row 0 of the fixture.
  CHECK(groups[0].key == std::vector<std::string>{"0.03"});
  for (const GroupRow& g : groups) {
    REQUIRE(g.metrics.size() == 1);
    CHECK(g.metrics[0].min <= g.metrics[0].mean);
    CHECK(g.metrics[0].mean <= g.metrics[0].max);
  }

  // Group means recombine to the global mean when weighted by count.
  const std::vector<double> all = t3.numeric_column("ft_acc");
  const double global_mean =
      std::accumulate(all.begin(), all.end(), 0.0) / double(all.size());
  double recombined = 0.0;
  for (const GroupRow& g : groups) {
    recombined += g.metrics[0].mean * double(g.count);
  }
  recombined /= double(t3.rows());
  CHECK(recombined == doctest::Approx(global_mean).epsilon(1e-12));
}

TEST_CASE("group_summary edge partitions") {
  const PoolTable t3 = table3();
  // Group counts always add back up to the table size.
  const auto by_wd = group_summary(t3, {"wd"}, {"pre_acc"});
  REQUIRE(by_wd.size() == 2);
  CHECK(by_wd[0].key == std::vector<std::string>{"0.1"});  // row 0 first
  CHECK(by_wd[0].count + by_wd[1].count == t3.rows());

  // The full hyperparameter tuple is unique per row: all singleton groups.
  const auto singletons =
      group_summary(t3, {"wd", "aug", "do", "adapt_lr"}, {"ft_acc"});
  REQUIRE(singletons.size() == t3.rows());
  for (const GroupRow& g : singletons) {
    CHECK(g.count == 1);
    CHECK(g.metrics[0].min == g.metrics[0].max);
  }
}

TEST_CASE("report_json is deterministic and carries the documented fields") {
  ReportSpec spec;
  spec.filters = {{"wd", "0.1"}, {"adapt_lr", "0.01"}};
  spec.correlations = {{"pre_acc", "maha_ninco_fpr"}};
  spec.group_by = {"aug"};
  spec.metrics = {"maha_ninco_fpr"};
  const std::string a = report_json(table3(), spec);
  const std::string b = report_json(table3(), spec);
  CHECK(a == b);
  CHECK(a.find("\"n_rows\": 14") != std::string::npos);
  CHECK(a.find("\"tau_b\"") != std::string::npos);
  CHECK(a.find("\"n\": 14") != std::string::npos);
  CHECK(a.find("\"groups\"") != std::string::npos);
  CHECK(a.find("\"filters\"") != std::string::npos);
}

TEST_CASE("emit_report writes the report and scatter CSVs") {
  TempDir dir("report");
  ReportSpec spec;
  spec.correlations = {{"pre_acc", "maha_ninco_fpr"}};
  spec.scatters = {{"pre_acc", "maha_ninco_fpr", "aug"}};
  emit_report(table3(), spec, dir.path());

  CHECK(std::filesystem::exists(dir.path() / "report.json"));
  const auto scatter_path =
      dir.path() / "scatter_pre_acc_vs_maha_ninco_fpr.csv";
  REQUIRE(std::filesystem::exists(scatter_path));
  std::ifstream in(scatter_path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "pre_acc,maha_ninco_fpr,aug");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 54);
}

TEST_CASE("reports on an empty filtered table stay well-formed") {
  ReportSpec spec;
  spec.filters = {{"aug", "absent-level"}};
  const std::string json = report_json(table3(), spec);
  CHECK(json.find("\"n_rows\": 0") != std::string::npos);

  TempDir dir("empty_report");
  spec.scatters = {{"pre_acc", "ft_acc", "aug"}};
  emit_report(table3(), spec, dir.path());
  std::ifstream in(dir.path() / "scatter_pre_acc_vs_ft_acc.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "pre_acc,ft_acc,aug");
  std::string extra;
  CHECK_FALSE(std::getline(in, extra));  // header only
}
