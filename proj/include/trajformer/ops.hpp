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

#ifndef TRAJFORMER__OPS_HPP_
#define TRAJFORMER__OPS_HPP_

#include <cstddef>
#include <vector>

#include "trajformer/tape.hpp"
#include "trajformer/tensor.hpp"

// Differentiable operations. Every op records its backward closure on the
// tape of its first operand; all operands must live on the same tape.
// Instantiated for float and double.

namespace trajformer::ops
{

/// [M x K] . [K x N] -> [M x N]. Rank-2 operands only.
template <typename T>
Var<T> matmul(Var<T> a, Var<T> b);

/// Elementwise a + b. If b is a single row of width cols(a), it is broadcast
/// over the rows of a.
template <typename T>
Var<T> add(Var<T> a, Var<T> b);

template <typename T>
Var<T> sub(Var<T> a, Var<T> b);

/// Hadamard product (same shapes).
template <typename T>
Var<T> mul(Var<T> a, Var<T> b);

template <typename T>
Var<T> div(Var<T> a, Var<T> b);

template <typename T>
Var<T> scale(Var<T> a, T c);

template <typename T>
Var<T> add_scalar(Var<T> a, T c);

template <typename T>
Var<T> transpose(Var<T> a);

/// Max-subtracted softmax along `axis` of a tensor of any rank.
template <typename T>
Var<T> softmax(Var<T> a, std::size_t axis);

/// Normalizes over the last axis, then applies per-column gain and bias.
template <typename T>
Var<T> layer_norm(Var<T> x, Var<T> gain, Var<T> bias, T eps = T(1e-5));

/// Exact (erf) GELU.
template <typename T>
Var<T> gelu(Var<T> a);

template <typename T>
Var<T> tanh(Var<T> a);

template <typename T>
Var<T> sigmoid(Var<T> a);

template <typename T>
Var<T> softplus(Var<T> a);

template <typename T>
Var<T> exp(Var<T> a);

/// Natural log; inputs must be strictly positive.
template <typename T>
Var<T> log(Var<T> a);

template <typename T>
Var<T> square(Var<T> a);

/// Columns [begin, end) of a rank-2 tensor.
template <typename T>
Var<T> slice_cols(Var<T> a, std::size_t begin, std::size_t end);

template <typename T>
Var<T> concat_cols(const std::vector<Var<T>> & parts);

/// Rows of `a` picked by index; indices may repeat.
template <typename T>
Var<T> gather_rows(Var<T> a, const std::vector<std::size_t> & index);

template <typename T>
Var<T> concat_rows(const std::vector<Var<T>> & parts);

/// Sum of all entries -> scalar.
template <typename T>
Var<T> sum(Var<T> a);

template <typename T>
Var<T> mean(Var<T> a);

template <typename T>
Var<T> reshape(Var<T> a, Shape shape);

/**
 * @brief out = a . w + b, the affine projection used by every linear layer.
 */
template <typename T>
Var<T> linear(Var<T> a, Var<T> w, Var<T> b)
{
  return add(matmul(a, w), b);
}

}  // namespace trajformer::ops

#endif  // TRAJFORMER__OPS_HPP_
