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

#ifndef OODKIT_DETECTOR_HPP_
#define OODKIT_DETECTOR_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "oodkit/data_model.hpp"
#include "oodkit/linalg.hpp"

namespace oodkit {

// The ten supported method identifiers, in canonical order.
extern const std::vector<std::string> kAllMethods;
bool is_known_method(const std::string& method);

// Normalized train features for the KNN score: row i is h_i / ||h_i||_2.
struct KnnIndex {
  Eigen::MatrixXd normalized_train;  // N x d, unit rows
  std::size_t k = 1000;              // neighbor rank, 1 <= k <= N
};

// Per-class mean softmax vectors; a class with no members (under the chosen
// grouping) has no template and is skipped by the scorer.
struct KlTemplates {
  Eigen::MatrixXd templates;  // C x C, row c = d_c where present
  std::vector<bool> present;  // length C
};

// Principal-space parameters for the virtual-logit score.
struct VimParams {
  Eigen::VectorXd u;      // feature-space offset, -(W^T)^+ b
  Eigen::MatrixXd r;      // d x D orthonormal basis of the principal space
  std::size_t d_principal = 0;
  double alpha = 0.0;     // virtual-logit scale, > 0
};

// Activation cap: 99th percentile of all train activations.
struct ReactParams {
  double r = 0.0;
};

// Per-class concept vectors (class-wise train means).
struct CosineConcepts {
  Eigen::MatrixXd concepts;  // C x d
};

enum class KlGrouping { predicted, labels };
enum class CosineMode { normalized, verbatim };

KlGrouping kl_grouping_from_string(const std::string& text);
CosineMode cosine_mode_from_string(const std::string& text);
std::string to_string(KlGrouping grouping);
std::string to_string(CosineMode mode);

struct DetectorConfig {
  std::vector<std::string> methods;  // empty means every method
  std::size_t knn_k = 1000;
  double jitter_scale = 1e-6;
  KlGrouping kl_grouping = KlGrouping::predicted;

  // The methods to fit, expanded and validated against kAllMethods.
  std::vector<std::string> resolved_methods() const;
};

// Everything a scorer can ask for, fitted from one train pack. Sub-states are
// present only when some requested method needs them; the provenance block
// ties every score back to the exact train bytes.
struct DetectorState {
  std::optional<Eigen::MatrixXd> head_w;  // d x C
  std::optional<Eigen::VectorXd> head_b;  // C
  std::optional<GaussianStats> gaussian;
  std::optional<KnnIndex> knn;
  std::optional<KlTemplates> kl;
  std::optional<VimParams> vim;
  std::optional<ReactParams> react;
  std::optional<CosineConcepts> cosine;

  std::string train_hash;     // hex digest of the train features tensor bytes
  std::string logits_source;  // "supplied", "derived", or "" when unused
  DetectorConfig config;
};

// Resolves the N x C logit matrix for a pack: supplied logits win over a
// derivable head (a note is written to `warn` when both exist); with neither,
// throws naming what is missing.
Eigen::MatrixXd resolve_logits(const FeaturePack& pack,
                               const std::optional<ClassifierHead>& head,
                               std::ostream* warn, std::string* source = nullptr);

// Individual fits. All of them read features as f64 and reduce in fixed row
// order, so repeated runs are bit-identical.
GaussianStats fit_gaussian(const FeaturePack& train, double jitter_scale = 1e-6);
KnnIndex fit_knn(const FeaturePack& train, std::size_t k = 1000);
KlTemplates fit_kl_templates(const FeaturePack& train,
                             const std::optional<ClassifierHead>& head,
                             KlGrouping grouping = KlGrouping::predicted,
                             std::ostream* warn = nullptr);
VimParams fit_vim(const FeaturePack& train,
                  const std::optional<ClassifierHead>& head,
                  std::ostream* warn = nullptr);
ReactParams fit_react(const FeaturePack& train);
CosineConcepts fit_cosine(const FeaturePack& train);

// The principal dimension D as a function of the feature dimension d:
// d >= 2048 -> 1000; 768 <= d < 2048 -> 512; otherwise round-half-to-even of
// d/2, clamped to >= 1.
std::size_t vim_principal_dim(std::size_t feature_dim);

struct FitOutcome {
  DetectorState state;
  // One "<method>: <reason>" entry per method whose fit failed; the other
  // sub-states are still populated.
  std::vector<std::string> errors;
};

// Fits every statistic the requested methods need (shared pieces are fitted
// once). Failures are collected per method instead of aborting the rest.
FitOutcome fit_all(const FeaturePack& train,
                   const std::optional<ClassifierHead>& head,
                   const DetectorConfig& config, std::ostream* warn = nullptr);

}  // namespace oodkit

#endif  // OODKIT_DETECTOR_HPP_
