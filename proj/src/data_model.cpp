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

#include "oodkit/data_model.hpp"

#include <stdexcept>

#include "oodkit/eigen_adapter.hpp"

namespace oodkit {

Role Role::parse(const std::string& text) {
  if (text == "train") return train();
  if (text == "id-test") return id_test();
  if (text.rfind("ood:", 0) == 0 && text.size() > 4) return ood(text.substr(4));
  throw std::invalid_argument("unrecognized role '" + text +
                              "' (expected train, id-test, or ood:<name>)");
}

std::string Role::str() const {
  switch (kind) {
    case Kind::train: return "train";
    case Kind::id_test: return "id-test";
    case Kind::ood: return "ood:" + ood_name;
  }
  return "invalid";
}

ValidationReport validate_pack(const FeaturePack& pack) {
  ValidationReport report;
  auto fail = [&report](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };

  if (pack.features.rank() != 2) {
    fail("features must be rank 2 (N x d), got rank " +
         std::to_string(pack.features.rank()));
    return report;
  }
  const std::size_t n = pack.rows();
  const std::size_t d = pack.dim();
  if (n == 0) fail("empty pack");
  if (d == 0) fail("feature dimension is zero");
  if (pack.num_classes == 0) fail("num_classes is zero");

  if (std::size_t i = pack.features.first_non_finite(); i != Tensor::npos) {
    fail("non-finite feature value at flat index " + std::to_string(i));
  }

  if (pack.labels.has_value()) {
    const Tensor& labels = *pack.labels;
    if (labels.dtype() != Dtype::i32 || labels.rank() != 1) {
      fail("labels must be a rank-1 i32 tensor");
    } else if (labels.extent(0) != n) {
      fail("label count " + std::to_string(labels.extent(0)) +
           " does not match row count " + std::to_string(n));
    } else {
      const auto y = labels.i32();
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0 || static_cast<std::size_t>(y[i]) >= pack.num_classes) {
          fail("label out of range at row " + std::to_string(i));
        }
      }
    }
  } else if (pack.role.kind == Role::Kind::train) {
    fail("train pack requires labels");
  }

  if (pack.logits.has_value()) {
    const Tensor& logits = *pack.logits;
    if (logits.rank() != 2) {
      fail("logits must be rank 2 (N x C)");
    } else {
      if (logits.extent(0) != n) {
        fail("logit row count " + std::to_string(logits.extent(0)) +
             " does not match feature row count " + std::to_string(n));
      }
      if (logits.extent(1) != pack.num_classes) {
        fail("logit column count " + std::to_string(logits.extent(1)) +
             " does not match num_classes " + std::to_string(pack.num_classes));
      }
    }
    if (std::size_t i = logits.first_non_finite(); i != Tensor::npos) {
      fail("non-finite logit value at flat index " + std::to_string(i));
    }
  }

  return report;
}

ValidationReport validate_head(const ClassifierHead& head) {
  ValidationReport report;
  auto fail = [&report](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };
  if (head.weight.rank() != 2) fail("head weight must be rank 2 (d x C)");
  if (head.bias.rank() != 1) fail("head bias must be rank 1 (C)");
  if (report.ok && head.weight.extent(1) != head.bias.extent(0)) {
    fail("head weight has " + std::to_string(head.weight.extent(1)) +
         " columns but bias has length " + std::to_string(head.bias.extent(0)));
  }
  return report;
}

Tensor logits_from_features(const Tensor& features, const ClassifierHead& head) {
  const auto report = validate_head(head);
  if (!report.ok) throw std::invalid_argument(report.violations.front());
  if (features.rank() != 2) {
    throw std::invalid_argument("features must be rank 2");
  }
  if (features.extent(1) != head.feature_dim()) {
    throw std::invalid_argument(
        "feature dimension " + std::to_string(features.extent(1)) +
        " does not match head weight rows " + std::to_string(head.feature_dim()));
  }
  const Eigen::MatrixXd h = to_matrix(features);      // N x d
  const Eigen::MatrixXd w = to_matrix(head.weight);   // d x C
  const Eigen::VectorXd b = to_vector(head.bias);     // C
  Eigen::MatrixXd logits = h * w;                     // row i = W^T h_i
  logits.rowwise() += b.transpose();
  return from_matrix(logits);
}

}  // namespace oodkit
