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

#include "oodkit/eigen_adapter.hpp"

#include <stdexcept>

namespace oodkit {

Eigen::MatrixXd to_matrix(const Tensor& t) {
  if (t.rank() != 2) {
    throw std::invalid_argument("expected a rank-2 tensor, got rank " +
                                std::to_string(t.rank()));
  }
  const auto rows = static_cast<Eigen::Index>(t.extent(0));
  const auto cols = static_cast<Eigen::Index>(t.extent(1));
  Eigen::MatrixXd m(rows, cols);
  // tensor data is row-major
  if (t.dtype() == Dtype::f64) {
    const auto data = t.f64();
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  } else if (t.dtype() == Dtype::f32) {
    const auto data = t.f32();
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        m(r, c) = static_cast<double>(data[r * cols + c]);
  } else {
    const auto data = t.i32();
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        m(r, c) = static_cast<double>(data[r * cols + c]);
  }
  return m;
}

Eigen::VectorXd to_vector(const Tensor& t) {
  if (t.rank() != 1) {
    throw std::invalid_argument("expected a rank-1 tensor, got rank " +
                                std::to_string(t.rank()));
  }
  const auto n = static_cast<Eigen::Index>(t.extent(0));
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = t.value_as_double(static_cast<std::size_t>(i));
  return v;
}

Tensor from_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> data(static_cast<std::size_t>(m.rows()) *
                           static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      data[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
  return Tensor::from_f64({static_cast<std::size_t>(m.rows()),
                           static_cast<std::size_t>(m.cols())},
                          std::move(data));
}

Tensor from_vector(const Eigen::VectorXd& v) {
  std::vector<double> data(v.data(), v.data() + v.size());
  return Tensor::from_f64({static_cast<std::size_t>(v.size())}, std::move(data));
}

}  // namespace oodkit
