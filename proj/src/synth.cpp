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

#include "oodkit/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace oodkit {

double GaussianStream::uniform53() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform53();
  const double u2 = uniform53();
  // 1 - u1 lies in (0, 1], so the log is finite.
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

namespace {

void check_spec(const SynthSpec& spec) {
  if (spec.num_classes < 1 || spec.dim < 1 || spec.per_class < 1) {
    throw std::invalid_argument("synth counts must all be >= 1");
  }
  for (double v : {spec.separation, spec.within_std, spec.shift}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(
          "synth scales must be finite and non-negative");
    }
  }
}

// Draws per_class rows per class around the given means; entries row-major.
std::vector<double> draw_mixture(const SynthSpec& spec,
                                 const Eigen::MatrixXd& means,
                                 GaussianStream& stream) {
  std::vector<double> rows;
  rows.reserve(spec.num_classes * spec.per_class * spec.dim);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      for (std::size_t j = 0; j < spec.dim; ++j) {
        rows.push_back(means(static_cast<Eigen::Index>(c),
                             static_cast<Eigen::Index>(j)) +
                       spec.within_std * stream.next());
      }
    }
  }
  return rows;
}

std::vector<std::int32_t> class_major_labels(const SynthSpec& spec) {
  std::vector<std::int32_t> labels;
  labels.reserve(spec.num_classes * spec.per_class);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    labels.insert(labels.end(), spec.per_class, static_cast<std::int32_t>(c));
  }
  return labels;
}

FeaturePack make_pack(const SynthSpec& spec, std::vector<double> rows,
                      bool with_labels, Role role) {
  FeaturePack pack;
  pack.features = Tensor::from_f64(
      {spec.num_classes * spec.per_class, spec.dim}, std::move(rows));
  if (with_labels) {
    pack.labels = Tensor::from_i32({spec.num_classes * spec.per_class},
                                   class_major_labels(spec));
  }
  pack.num_classes = spec.num_classes;
  pack.role = std::move(role);
  return pack;
}

}  // namespace

SynthResult synth_pack(const SynthSpec& spec) {
  check_spec(spec);
  GaussianStream stream(spec.seed);

  SynthResult result;
  result.true_means = Eigen::MatrixXd(static_cast<Eigen::Index>(spec.num_classes),
                                      static_cast<Eigen::Index>(spec.dim));
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t j = 0; j < spec.dim; ++j) {
      result.true_means(static_cast<Eigen::Index>(c),
                        static_cast<Eigen::Index>(j)) =
          spec.separation * stream.next();
    }
  }

  result.train =
      make_pack(spec, draw_mixture(spec, result.true_means, stream),
                /*with_labels=*/true, Role::train());
  result.id_test =
      make_pack(spec, draw_mixture(spec, result.true_means, stream),
                /*with_labels=*/true, Role::id_test());

  std::vector<double> ood_rows = draw_mixture(spec, result.true_means, stream);
  for (std::size_t r = 0; r < spec.num_classes * spec.per_class; ++r) {
    ood_rows[r * spec.dim] += spec.shift;
  }
  result.ood = make_pack(spec, std::move(ood_rows), /*with_labels=*/false,
                         Role::ood("shift"));

  // Bayes linear-discriminant head for the isotropic mixture:
  // W[:, c] = mu_c / sigma^2, b[c] = -||mu_c||^2 / (2 sigma^2).
  const double sigma_sq =
      spec.within_std > 0.0 ? spec.within_std * spec.within_std : 1.0;
  std::vector<double> w(spec.dim * spec.num_classes);
  std::vector<double> b(spec.num_classes);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < spec.dim; ++j) {
      const double mu = result.true_means(static_cast<Eigen::Index>(c),
                                          static_cast<Eigen::Index>(j));
      w[j * spec.num_classes + c] = mu / sigma_sq;
      norm_sq += mu * mu;
    }
    b[c] = -0.5 * norm_sq / sigma_sq;
  }
  result.head.weight =
      Tensor::from_f64({spec.dim, spec.num_classes}, std::move(w));
  result.head.bias = Tensor::from_f64({spec.num_classes}, std::move(b));

  nlohmann::json meta;
  meta["generator"] = kSynthAlgorithmId;
  meta["num_classes"] = spec.num_classes;
  meta["dim"] = spec.dim;
  meta["per_class"] = spec.per_class;
  meta["separation"] = spec.separation;
  meta["within_std"] = spec.within_std;
  meta["shift"] = spec.shift;
  meta["seed"] = spec.seed;
  result.metadata_json = meta.dump();
  return result;
}

}  // namespace oodkit
