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

#ifndef OODKIT_EVAL_HPP_
#define OODKIT_EVAL_HPP_

#include <string>
#include <utility>
#include <vector>

#include "oodkit/data_model.hpp"

namespace oodkit {

enum class AucPooling { per_class, pooled };
AucPooling auc_pooling_from_string(const std::string& text);
std::string to_string(AucPooling pooling);

struct PerClassEval {
  double fpr = 0.0;
  double auroc = 0.0;
  std::size_t n_ood = 0;
};

// The full evaluation protocol output. A sample is accepted (treated as ID)
// iff its score >= tau; tau admits at least tpr_target of the ID scores.
struct EvalResult {
  double tau = 0.0;
  double tpr_target = 0.95;
  std::vector<std::pair<std::string, PerClassEval>> per_class;
  double mean_fpr = 0.0;
  double mean_auroc = 0.0;  // per-class mean, or pooled when requested
  std::size_t n_failed = 0;
  double fail_threshold = 0.10;
  AucPooling auc_pooling = AucPooling::per_class;
  std::string method;
};

// tau = the k-th largest ID score, k = ceil(q * N). Acceptance of at least
// q N ID samples is guaranteed; ties may accept more.
double threshold_at_tpr(const std::vector<double>& id_scores, double q);

struct FprResult {
  double tau = 0.0;
  std::vector<std::pair<std::string, double>> per_class_fpr;
  double mean_fpr = 0.0;
};

// One shared tau from the ID scores, then per-class fraction of OOD scores
// accepted (>= tau, inclusive), and the mean across classes.
FprResult fpr_at_tpr(
    const std::vector<double>& id_scores,
    const std::vector<std::pair<std::string, std::vector<double>>>& ood_by_class,
    double q);

// Mann-Whitney AUROC: fraction of (id, ood) pairs with id > ood, ties as 1/2.
// Computed with average ranks in O(n log n).
double auroc(const std::vector<double>& id_scores,
             const std::vector<double>& ood_scores);

// Number of classes with fpr >= fail_threshold (inclusive boundary).
std::size_t count_failed_unit_tests(const std::vector<double>& per_class_fpr,
                                    double fail_threshold = 0.10);

// Composes the above over named score sets; every set must share the method
// and the detector-state hash of the ID set.
EvalResult evaluate(
    const ScoreSet& id_scores,
    const std::vector<std::pair<std::string, ScoreSet>>& ood_scores,
    double q = 0.95, double fail_threshold = 0.10,
    AucPooling pooling = AucPooling::per_class);

// Fixed-schema JSON rendering (keys: tau, tpr_target, per_class, mean_fpr,
// mean_auroc, n_failed, fail_threshold, auc_pooling, method). Rates are
// fractions in [0, 1].
std::string eval_result_to_json(const EvalResult& result);

}  // namespace oodkit

#endif  // OODKIT_EVAL_HPP_
