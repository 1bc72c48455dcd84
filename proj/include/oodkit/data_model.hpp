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

#ifndef OODKIT_DATA_MODEL_HPP_
#define OODKIT_DATA_MODEL_HPP_

#include <optional>
#include <string>
#include <vector>

#include "oodkit/tensor.hpp"

namespace oodkit {

/// Which split a pack belongs to: the train set, the in-distribution test
/// set, or a named out-of-distribution class.
struct Role {
  enum class Kind { train, id_test, ood };

  Kind kind = Kind::train;
  std::string ood_name;  // only meaningful for Kind::ood

  static Role train() { return {Kind::train, {}}; }
  static Role id_test() { return {Kind::id_test, {}}; }
  static Role ood(std::string name) { return {Kind::ood, std::move(name)}; }

  /// Parses "train", "id-test" or "ood:<name>"; throws on anything else.
  static Role parse(const std::string& text);
  std::string str() const;

  bool operator==(const Role& other) const = default;
};

/// Precomputed classifier outputs for one split: features h (N x d),
/// optional logits o (N x C), optional labels y, and the class count C.
struct FeaturePack {
  Tensor features;               // N x d, f32 or f64
  std::optional<Tensor> logits;  // N x C, f32 or f64
  std::optional<Tensor> labels;  // N, i32
  std::size_t num_classes = 0;
  Role role;

  std::size_t rows() const { return features.rank() == 2 ? features.extent(0) : 0; }
  std::size_t dim() const { return features.rank() == 2 ? features.extent(1) : 0; }
};

/// The last fully connected layer: logits(h) = W^T h + b with W of shape
/// d x C and b of length C.
struct ClassifierHead {
  Tensor weight;  // d x C
  Tensor bias;    // C

  std::size_t feature_dim() const { return weight.rank() == 2 ? weight.extent(0) : 0; }
  std::size_t num_classes() const { return weight.rank() == 2 ? weight.extent(1) : 0; }
};

/// Per-sample scalar OOD scores for one pack; larger means more
/// in-distribution.
struct ScoreSet {
  std::string method;
  std::vector<double> values;
  Role source_role;
  std::string state_hash;  // provenance of the detector state that scored
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Checks every FeaturePack invariant; violations are reported, never thrown.
ValidationReport validate_pack(const FeaturePack& pack);

/// Checks the head's own shape invariants (W is d x C, |b| = C).
ValidationReport validate_head(const ClassifierHead& head);

/// Row i of the result is W^T h_i + b. Throws on dimension mismatch.
/// Output is f64 regardless of input dtypes.
Tensor logits_from_features(const Tensor& features, const ClassifierHead& head);

}  // namespace oodkit

#endif  // OODKIT_DATA_MODEL_HPP_
