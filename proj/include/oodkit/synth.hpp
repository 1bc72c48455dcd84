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

#ifndef OODKIT_SYNTH_HPP_
#define OODKIT_SYNTH_HPP_

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "oodkit/data_model.hpp"

namespace oodkit {

// Parameters of the synthetic class-conditional Gaussian generator. The seed
// fully determines every output byte.
struct SynthSpec {
  std::size_t num_classes = 2;
  std::size_t dim = 2;
  std::size_t per_class = 10;  // rows per class in each generated pack
  double separation = 5.0;     // scale of the random class-mean placement
  double within_std = 1.0;     // isotropic within-class standard deviation
  double shift = 0.0;          // OOD translation along the first axis
  std::uint64_t seed = 0;
};

// Everything the generator knows: the three packs plus the ground truth the
// packs were drawn from (true class means and the Bayes linear head for the
// isotropic mixture), so oracle comparisons need no re-derivation.
struct SynthResult {
  FeaturePack train;
  FeaturePack id_test;
  FeaturePack ood;  // same mixture translated by `shift` along axis 0
  Eigen::MatrixXd true_means;  // C x d
  ClassifierHead head;
  std::string metadata_json;  // records the generator algorithm id and spec
};

// Deterministic standard-normal stream: mt19937_64 -> 53-bit uniforms
// u = (x >> 11) * 2^-53 -> Box-Muller pairs with radius sqrt(-2 ln(1 - u1)).
// Algorithm id "mt19937_64/box-muller-v1"; the C++ standard library's
// normal_distribution is not used because its output sequence is
// implementation-defined.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}
  double next();

 private:
  double uniform53();
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr char kSynthAlgorithmId[] = "mt19937_64/box-muller-v1";

// Draws class means (separation * N(0, I), class-major), then the train,
// id-test, and OOD packs in that order (rows class-major, entries row-major).
// The OOD pack is a fresh draw from the same mixture translated by
// shift * e0. Identical specs produce bit-identical tensors.
SynthResult synth_pack(const SynthSpec& spec);

}  // namespace oodkit

#endif  // OODKIT_SYNTH_HPP_
