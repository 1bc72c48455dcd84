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

#ifndef OODKIT_TENSOR_HPP_
#define OODKIT_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace oodkit {

/// Element kinds supported by the on-disk OODT format. The numeric values
/// are the dtype codes written in OODT headers.
enum class Dtype : std::uint8_t {
  f32 = 1,  // IEEE-754 binary32, little-endian on disk
  f64 = 2,  // IEEE-754 binary64, little-endian on disk
  i32 = 3,  // two's-complement signed 32-bit, little-endian on disk
};

std::size_t dtype_size(Dtype dtype);
std::string dtype_name(Dtype dtype);

/// Dense row-major tensor. Element count always equals the product of the
/// shape extents (empty shape = rank-0 scalar, one element).
class Tensor {
 public:
  Tensor() : data_(std::vector<float>{0.0f}) {}

  static Tensor from_f32(std::vector<std::size_t> shape, std::vector<float> data);
  static Tensor from_f64(std::vector<std::size_t> shape, std::vector<double> data);
  static Tensor from_i32(std::vector<std::size_t> shape, std::vector<std::int32_t> data);
  static Tensor zeros(Dtype dtype, std::vector<std::size_t> shape);

  Dtype dtype() const;
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const;

  std::span<const float> f32() const;
  std::span<const double> f64() const;
  std::span<const std::int32_t> i32() const;
  std::span<float> f32_mut();
  std::span<double> f64_mut();
  std::span<std::int32_t> i32_mut();

  /// Element i as a double, whatever the dtype.
  double value_as_double(std::size_t i) const;

  const std::byte* raw_data() const;
  std::size_t byte_size() const { return size() * dtype_size(dtype()); }

  /// True when every stored floating value is finite. Integer tensors are
  /// trivially finite.
  bool all_finite() const;

  /// Index of the first non-finite value, or npos when all are finite.
  std::size_t first_non_finite() const;

  bool same_contents(const Tensor& other) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  Tensor(std::vector<std::size_t> shape,
         std::variant<std::vector<float>, std::vector<double>, std::vector<std::int32_t>> data);

  std::vector<std::size_t> shape_;
  std::variant<std::vector<float>, std::vector<double>, std::vector<std::int32_t>> data_;
};

/// Product of the extents; throws on overflow.
std::size_t shape_element_count(const std::vector<std::size_t>& shape);

}  // namespace oodkit

#endif  // OODKIT_TENSOR_HPP_
