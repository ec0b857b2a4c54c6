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

#ifndef TRAJFORMER__TAPE_HPP_
#define TRAJFORMER__TAPE_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "trajformer/errors.hpp"
#include "trajformer/tensor.hpp"

namespace trajformer
{

template <typename T>
class Tape;

/// Handle to a value recorded on a Tape.
template <typename T>
struct Var
{
  Tape<T> * tape = nullptr;
  std::size_t id = 0;

  const Tensor<T> & value() const { return tape->value(*this); }
  const Shape & shape() const { return tape->value(*this).shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/**
 * @brief Reverse-mode differentiation record.
 *
 * Nodes are appended in execution order, so the node list is already a
 * topological order. backward() walks it once in reverse. A tape can be
 * differentiated only once; a second backward() throws ContractError.
 */
template <typename T>
class Tape
{
public:
  using BackwardFn = std::function<void(Tape &, std::size_t)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape & operator=(const Tape &) = delete;

  /// Records a leaf. Leaves with requires_grad receive a gradient on backward().
  Var<T> leaf(Tensor<T> value, bool requires_grad)
  {
    check_finite(value, "leaf");
    nodes_.push_back(Node{std::move(value), {}, requires_grad, true, {}});
    return Var<T>{this, nodes_.size() - 1};
  }

  Var<T> constant(Tensor<T> value) { return leaf(std::move(value), false); }

  /**
   * @brief Records an operation result.
   *
   * The closure is kept only when some parent requires a gradient.
   */
  Var<T> push(
    Tensor<T> value, std::initializer_list<Var<T>> parents, BackwardFn backward, const char * op)
  {
    check_finite(value, op);
    bool needs = false;
    for (const auto & p : parents) {
      needs = needs || nodes_[p.id].requires_grad;
    }
    nodes_.push_back(Node{std::move(value), {}, needs, false, needs ? std::move(backward) : nullptr});
    return Var<T>{this, nodes_.size() - 1};
  }

  Var<T> push(
    Tensor<T> value, const std::vector<Var<T>> & parents, BackwardFn backward, const char * op)
  {
    check_finite(value, op);
    bool needs = false;
    for (const auto & p : parents) {
      needs = needs || nodes_[p.id].requires_grad;
    }
    nodes_.push_back(Node{std::move(value), {}, needs, false, needs ? std::move(backward) : nullptr});
    return Var<T>{this, nodes_.size() - 1};
  }

  const Tensor<T> & value(Var<T> v) const { return nodes_[v.id].value; }
  const Tensor<T> & value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(Var<T> v) const { return nodes_[v.id].requires_grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  /// Gradient of a node after backward(); zero-shaped before.
  const Tensor<T> & grad(Var<T> v) const { return nodes_[v.id].grad; }
  const Tensor<T> & grad(std::size_t id) const { return nodes_[id].grad; }

  /// Accumulation buffer for a parent inside a backward closure.
  Tensor<T> & grad_mut(std::size_t id)
  {
    Node & n = nodes_[id];
    if (n.grad.empty() && !n.value.empty()) {
      n.grad = Tensor<T>(n.value.shape());
    }
    return n.grad;
  }

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  void backward(Var<T> output)
  {
    if (output.tape != this) {
      throw ContractError("backward: output was recorded on a different tape");
    }
    if (nodes_[output.id].value.size() != 1) {
      throw ContractError(
        "backward: output must be a scalar, got shape " +
        shape_string(nodes_[output.id].value.shape()));
    }
    if (consumed_) {
      throw ContractError("backward: tape already differentiated; re-run the forward pass");
    }
    consumed_ = true;
    for (auto & n : nodes_) {
      if (n.requires_grad) {
        n.grad = Tensor<T>(n.value.shape());
      }
    }
    if (!nodes_[output.id].requires_grad) {
      return;
    }
    nodes_[output.id].grad[0] = T(1);
    for (std::size_t i = output.id + 1; i-- > 0;) {
      Node & n = nodes_[i];
      if (n.backward) {
        n.backward(*this, i);
      }
    }
  }

private:
  struct Node
  {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad;
    bool is_leaf;
    BackwardFn backward;
  };

  static void check_finite(const Tensor<T> & v, const char * op)
  {
    if (!v.all_finite()) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
  }

  std::deque<Node> nodes_;  // stable element references across push
  bool consumed_ = false;
};

}  // namespace trajformer

#endif  // TRAJFORMER__TAPE_HPP_
