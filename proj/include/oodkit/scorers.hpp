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

#ifndef OODKIT_SCORERS_HPP_
#define OODKIT_SCORERS_HPP_

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "oodkit/data_model.hpp"
#include "oodkit/detector.hpp"

namespace oodkit {

// Per-sample OOD scores. Convention throughout: larger = more
// in-distribution. Each function scores one row; `score_pack` drives batches.

// Max softmax probability, in [1/C, 1].
double score_msp(const Eigen::VectorXd& logits);

// Largest logit entry.
double score_maxlogit(const Eigen::VectorXd& logits);

// log-sum-exp of the logits (softmax denominator), max-shifted.
double score_energy(const Eigen::VectorXd& logits);

// -min over present templates of KL(softmax(logits) || d_c); <= 0, equal to 0
// only when the softmax matches a template exactly.
double score_kl_matching(const Eigen::VectorXd& logits, const KlTemplates& kl);

// -(distance to the K-th nearest normalized train row); <= 0.
double score_knn(const Eigen::VectorXd& h, const KnnIndex& knn);

// -min_c of the squared Mahalanobis distance to class mean c; <= 0.
double score_mahalanobis(const Eigen::VectorXd& h, const GaussianStats& g);

// -min_c of (class Mahalanobis term - global Mahalanobis term); sign-free.
double score_rel_mahalanobis(const Eigen::VectorXd& h, const GaussianStats& g);

// Energy of the head logits after clipping features at the ReAct threshold.
double score_react_energy(const Eigen::VectorXd& h, const ReactParams& react,
                          const Eigen::MatrixXd& w, const Eigen::VectorXd& b);

// Virtual-logit score: -exp(o0) / (sum_c exp(o_c) + exp(o0)) with
// o0 = alpha * ||residual of (h - u) off the principal space||; in [-1, 0).
double score_vim(const Eigen::VectorXd& h, const Eigen::VectorXd& logits,
                 const VimParams& vim);

// Max similarity to the class concepts. normalized: true cosine similarity;
// verbatim: only the concept is normalized (the projection can exceed 1).
double score_cosine(const Eigen::VectorXd& h, const CosineConcepts& cosine,
                    CosineMode mode = CosineMode::normalized);

// Applies one method to every row of the pack (parallel over rows, output in
// input order, bit-identical across thread counts). Throws when the state
// lacks a statistic the method needs, naming both. Post-conditions on the
// score ranges are asserted on the whole batch.
ScoreSet score_pack(const FeaturePack& pack, const DetectorState& state,
                    const std::string& method,
                    CosineMode cosine_mode = CosineMode::normalized,
                    std::ostream* warn = nullptr);

}  // namespace oodkit

#endif  // OODKIT_SCORERS_HPP_
