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

#include "oodkit/tensor.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace oodkit {

std::size_t dtype_size(Dtype dtype) {
  switch (dtype) {
    case Dtype::f32: return 4;
    case Dtype::f64: return 8;
    case Dtype::i32: return 4;
  }
  throw std::invalid_argument("unknown dtype code " +
                              std::to_string(static_cast<int>(dtype)));
}

std::string dtype_name(Dtype dtype) {
  switch (dtype) {
    case Dtype::f32: return "f32";
    case Dtype::f64: return "f64";
    case Dtype::i32: return "i32";
  }
  return "invalid";
}

std::size_t shape_element_count(const std::vector<std::size_t>& shape) {
  std::size_t count = 1;
  for (std::size_t extent : shape) {
    if (extent != 0 && count > std::numeric_limits<std::size_t>::max() / extent) {
      throw std::overflow_error("tensor shape overflows element count");
    }
    count *= extent;
  }
  return count;
}

Tensor::Tensor(std::vector<std::size_t> shape,
               std::variant<std::vector<float>, std::vector<double>,
                            std::vector<std::int32_t>> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  const std::size_t expected = shape_element_count(shape_);
  const std::size_t actual =
      std::visit([](const auto& v) { return v.size(); }, data_);
  if (expected != actual) {
    throw std::invalid_argument("tensor data size " + std::to_string(actual) +
                                " does not match shape element count " +
                                std::to_string(expected));
  }
}

Tensor Tensor::from_f32(std::vector<std::size_t> shape, std::vector<float> data) {
  return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::from_f64(std::vector<std::size_t> shape, std::vector<double> data) {
  return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::from_i32(std::vector<std::size_t> shape, std::vector<std::int32_t> data) {
  return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::zeros(Dtype dtype, std::vector<std::size_t> shape) {
  const std::size_t count = shape_element_count(shape);
  switch (dtype) {
    case Dtype::f32: return Tensor(std::move(shape), std::vector<float>(count, 0.0f));
    case Dtype::f64: return Tensor(std::move(shape), std::vector<double>(count, 0.0));
    case Dtype::i32: return Tensor(std::move(shape), std::vector<std::int32_t>(count, 0));
  }
  throw std::invalid_argument("unknown dtype");
}

Dtype Tensor::dtype() const {
  if (std::holds_alternative<std::vector<float>>(data_)) return Dtype::f32;
  if (std::holds_alternative<std::vector<double>>(data_)) return Dtype::f64;
  return Dtype::i32;
}

std::size_t Tensor::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

namespace {
[[noreturn]] void bad_access(const Tensor& t, const char* wanted) {
  throw std::logic_error("tensor holds " + dtype_name(t.dtype()) +
                         " but was accessed as " + wanted);
}
}  // namespace

std::span<const float> Tensor::f32() const {
  if (const auto* v = std::get_if<std::vector<float>>(&data_)) return {*v};
  bad_access(*this, "f32");
}

std::span<const double> Tensor::f64() const {
  if (const auto* v = std::get_if<std::vector<double>>(&data_)) return {*v};
  bad_access(*this, "f64");
}

std::span<const std::int32_t> Tensor::i32() const {
  if (const auto* v = std::get_if<std::vector<std::int32_t>>(&data_)) return {*v};
  bad_access(*this, "i32");
}

std::span<float> Tensor::f32_mut() {
  if (auto* v = std::get_if<std::vector<float>>(&data_)) return {*v};
  bad_access(*this, "f32");
}

std::span<double> Tensor::f64_mut() {
  if (auto* v = std::get_if<std::vector<double>>(&data_)) return {*v};
  bad_access(*this, "f64");
}

std::span<std::int32_t> Tensor::i32_mut() {
  if (auto* v = std::get_if<std::vector<std::int32_t>>(&data_)) return {*v};
  bad_access(*this, "i32");
}

double Tensor::value_as_double(std::size_t i) const {
  return std::visit([i](const auto& v) { return static_cast<double>(v.at(i)); },
                    data_);
}

const std::byte* Tensor::raw_data() const {
  return std::visit(
      [](const auto& v) {
        return reinterpret_cast<const std::byte*>(v.data());
      },
      data_);
}

std::size_t Tensor::first_non_finite() const {
  if (dtype() == Dtype::i32) return npos;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(value_as_double(i))) return i;
  }
  return npos;
}

bool Tensor::all_finite() const { return first_non_finite() == npos; }

bool Tensor::same_contents(const Tensor& other) const {
  if (dtype() != other.dtype() || shape_ != other.shape_) return false;
  if (byte_size() == 0) return true;
  return std::memcmp(raw_data(), other.raw_data(), byte_size()) == 0;
}

}  // namespace oodkit
