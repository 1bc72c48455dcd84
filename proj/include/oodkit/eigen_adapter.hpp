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

#ifndef OODKIT_EIGEN_ADAPTER_HPP_
#define OODKIT_EIGEN_ADAPTER_HPP_

#include <Eigen/Dense>

#include "oodkit/tensor.hpp"

namespace oodkit {

/// Rank-2 tensor to a dense double matrix (f32 inputs are widened).
Eigen::MatrixXd to_matrix(const Tensor& t);

/// Rank-1 tensor to a dense double vector.
Eigen::VectorXd to_vector(const Tensor& t);

Tensor from_matrix(const Eigen::MatrixXd& m);
Tensor from_vector(const Eigen::VectorXd& v);

}  // namespace oodkit

#endif  // OODKIT_EIGEN_ADAPTER_HPP_
