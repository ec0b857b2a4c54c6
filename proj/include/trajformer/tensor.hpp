// Copyright 2026 The Trajformer Authors
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

#ifndef TRAJFORMER__TENSOR_HPP_
#define TRAJFORMER__TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajformer/errors.hpp"

namespace trajformer
{

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape & shape)
{
  return std::accumulate(
    shape.begin(), shape.end(), std::size_t{1}, std::multiplies<std::size_t>());
}

inline std::string shape_string(const Shape & shape)
{
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      s += "x";
    }
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

/**
 * @brief Dense row-major array with shape metadata.
 *
 * The scalar type is the dtype: Tensor<float> for training, Tensor<double>
 * for gradient checks.
 */
template <typename T>
class Tensor
{
public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Shape shape, T fill = T(0))
  : shape_(std::move(shape)), data_(shape_size(shape_), fill)
  {
  }

  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data))
  {
    if (shape_size(shape_) != data_.size()) {
      throw DimensionError(
        "tensor shape " + shape_string(shape_) + " does not match " +
        std::to_string(data_.size()) + " values");
    }
  }

  static Tensor scalar(T v) { return Tensor(Shape{1}, std::vector<T>{v}); }

  const Shape & shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  /// Rows/cols of a rank-2 tensor (a rank-1 tensor is a single row).
  std::size_t rows() const { return shape_.size() == 1 ? 1 : shape_.at(0); }
  std::size_t cols() const { return shape_.back(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T> & values() const { return data_; }

  T & operator[](std::size_t i) { return data_[i]; }
  const T & operator[](std::size_t i) const { return data_[i]; }

  T & at(std::size_t r, std::size_t c) { return data_[r * shape_.back() + c]; }
  const T & at(std::size_t r, std::size_t c) const { return data_[r * shape_.back() + c]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  void reshape(Shape shape)
  {
    if (shape_size(shape) != data_.size()) {
      throw DimensionError(
        "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    }
    shape_ = std::move(shape);
  }

  bool all_finite() const
  {
    return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
  }

  template <typename U>
  Tensor<U> cast() const
  {
    return Tensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

  friend bool operator==(const Tensor & a, const Tensor & b)
  {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

private:
  Shape shape_;
  std::vector<T> data_;
};

}  // namespace trajformer

#endif  // TRAJFORMER__TENSOR_HPP_
