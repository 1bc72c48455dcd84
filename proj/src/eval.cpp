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

#include "oodkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oodkit {

AucPooling auc_pooling_from_string(const std::string& text) {
  if (text == "per_class") return AucPooling::per_class;
  if (text == "pooled") return AucPooling::pooled;
  throw std::invalid_argument("unknown AUC pooling '" + text +
                              "' (expected 'per_class' or 'pooled')");
}

std::string to_string(AucPooling pooling) {
  return pooling == AucPooling::per_class ? "per_class" : "pooled";
}

double threshold_at_tpr(const std::vector<double>& id_scores, double q) {
  if (id_scores.empty()) {
    throw std::invalid_argument("threshold needs at least one ID score");
  }
  if (!(q > 0.0) || q > 1.0) {
    throw std::invalid_argument("q must lie in (0, 1]");
  }
  // The guard keeps exactly-representable products (e.g. 0.95 * 20 landing a
  // hair above the integer) from rounding up one rank.
  const double n = static_cast<double>(id_scores.size());
  auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, id_scores.size());

  std::vector<double> sorted = id_scores;
  auto kth = sorted.begin() + static_cast<long>(k - 1);
  std::nth_element(sorted.begin(), kth, sorted.end(), std::greater<>());
  return *kth;  // the k-th largest
}

FprResult fpr_at_tpr(
    const std::vector<double>& id_scores,
    const std::vector<std::pair<std::string, std::vector<double>>>& ood_by_class,
    double q) {
  FprResult result;
  result.tau = threshold_at_tpr(id_scores, q);
  double sum = 0.0;
  for (const auto& [name, scores] : ood_by_class) {
    if (scores.empty()) {
      throw std::invalid_argument("empty OOD class '" + name + "'");
    }
    const auto accepted = std::count_if(
        scores.begin(), scores.end(),
        [&](double s) { return s >= result.tau; });
    const double fpr =
        static_cast<double>(accepted) / static_cast<double>(scores.size());
    result.per_class_fpr.emplace_back(name, fpr);
    sum += fpr;
  }
  if (ood_by_class.empty()) {
    throw std::invalid_argument("at least one OOD class is required");
  }
  result.mean_fpr = sum / static_cast<double>(ood_by_class.size());
  return result;
}

double auroc(const std::vector<double>& id_scores,
             const std::vector<double>& ood_scores) {
  if (id_scores.empty() || ood_scores.empty()) {
    throw std::invalid_argument("auroc needs non-empty ID and OOD score sets");
  }
  // Pool, sort, assign average ranks to ties, then Mann-Whitney U over the ID
  // ranks gives P(id > ood) + P(id = ood)/2.
  struct Entry {
    double score;
    bool is_id;
  };
  std::vector<Entry> pooled;
  pooled.reserve(id_scores.size() + ood_scores.size());
  for (double s : id_scores) pooled.push_back({s, true});
  for (double s : ood_scores) pooled.push_back({s, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  double id_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].score == pooled[i].score) ++j;
    // Ranks are 1-based; everyone in the tie block gets the block's mean rank.
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (pooled[t].is_id) id_rank_sum += avg_rank;
    }
    i = j;
  }
  const double n_id = static_cast<double>(id_scores.size());
  const double n_ood = static_cast<double>(ood_scores.size());
  const double u = id_rank_sum - n_id * (n_id + 1.0) / 2.0;
  return u / (n_id * n_ood);
}

std::size_t count_failed_unit_tests(const std::vector<double>& per_class_fpr,
                                    double fail_threshold) {
  return static_cast<std::size_t>(
      std::count_if(per_class_fpr.begin(), per_class_fpr.end(),
                    [&](double fpr) { return fpr >= fail_threshold; }));
}

EvalResult evaluate(
    const ScoreSet& id_scores,
    const std::vector<std::pair<std::string, ScoreSet>>& ood_scores,
    double q, double fail_threshold, AucPooling pooling) {
  for (const auto& [name, set] : ood_scores) {
    if (set.state_hash != id_scores.state_hash) {
      throw std::runtime_error(
          "OOD score set '" + name +
          "' comes from a different detector state than the ID set");
    }
    if (set.method != id_scores.method) {
      throw std::runtime_error("OOD score set '" + name + "' was scored with '" +
                               set.method + "', the ID set with '" +
                               id_scores.method + "'");
    }
  }

  std::vector<std::pair<std::string, std::vector<double>>> ood_values;
  ood_values.reserve(ood_scores.size());
  for (const auto& [name, set] : ood_scores) {
    ood_values.emplace_back(name, set.values);
  }
  const FprResult fpr = fpr_at_tpr(id_scores.values, ood_values, q);

  EvalResult result;
  result.tau = fpr.tau;
  result.tpr_target = q;
  result.fail_threshold = fail_threshold;
  result.auc_pooling = pooling;
  result.method = id_scores.method;
  result.mean_fpr = fpr.mean_fpr;

  std::vector<double> per_class_fpr;
  double auroc_sum = 0.0;
  for (std::size_t c = 0; c < ood_values.size(); ++c) {
    PerClassEval entry;
    entry.fpr = fpr.per_class_fpr[c].second;
    entry.auroc = auroc(id_scores.values, ood_values[c].second);
    entry.n_ood = ood_values[c].second.size();
    auroc_sum += entry.auroc;
    per_class_fpr.push_back(entry.fpr);
    result.per_class.emplace_back(ood_values[c].first, entry);
  }
  if (pooling == AucPooling::per_class) {
    result.mean_auroc = auroc_sum / static_cast<double>(ood_values.size());
  } else {
    std::vector<double> all_ood;
    for (const auto& [name, values] : ood_values) {
      all_ood.insert(all_ood.end(), values.begin(), values.end());
    }
    result.mean_auroc = auroc(id_scores.values, all_ood);
  }
  result.n_failed = count_failed_unit_tests(per_class_fpr, fail_threshold);
  return result;
}

std::string eval_result_to_json(const EvalResult& result) {
  nlohmann::json j;
  j["tau"] = result.tau;
  j["tpr_target"] = result.tpr_target;
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [name, entry] : result.per_class) {
    per_class[name] = {{"fpr", entry.fpr},
                       {"auroc", entry.auroc},
                       {"n_ood", entry.n_ood}};
  }
  j["per_class"] = per_class;
  j["mean_fpr"] = result.mean_fpr;
  j["mean_auroc"] = result.mean_auroc;
  j["n_failed"] = result.n_failed;
  j["fail_threshold"] = result.fail_threshold;
  j["auc_pooling"] = to_string(result.auc_pooling);
  j["method"] = result.method;
  return j.dump(2) + "\n";
}

}  // namespace oodkit
