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

#ifndef TRAJFORMER__OPTIM_HPP_
#define TRAJFORMER__OPTIM_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "trajformer/tensor.hpp"

namespace trajformer
{

/// A named trainable tensor and its gradient accumulator.
template <typename T>
struct Parameter
{
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

/**
 * @brief Ordered collection of parameters. Insertion order is the canonical
 * order used by the optimizer and by checkpoints.
 */
template <typename T>
class ParameterSet
{
public:
  /// Returns the index of the new parameter. Names must be unique.
  std::size_t add(std::string name, Tensor<T> value);

  std::size_t index_of(const std::string & name) const;
  bool contains(const std::string & name) const;

  Parameter<T> & operator[](std::size_t i) { return params_[i]; }
  const Parameter<T> & operator[](std::size_t i) const { return params_[i]; }
  Parameter<T> & at(const std::string & name) { return params_[index_of(name)]; }
  const Parameter<T> & at(const std::string & name) const { return params_[index_of(name)]; }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();

  template <typename U>
  ParameterSet<U> cast() const
  {
    ParameterSet<U> out;
    for (const auto & p : params_) {
      out.add(p.name, p.value.template cast<U>());
    }
    return out;
  }

private:
  std::vector<Parameter<T>> params_;
};

/// Adam moments; m[i], v[i] follow the parameter order of the ParameterSet.
struct AdamState
{
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<Tensor<float>> m;
  std::vector<Tensor<float>> v;

  friend bool operator==(const AdamState &, const AdamState &) = default;
};

/// Zero moments shaped like `params`.
template <typename T>
AdamState make_adam_state(const ParameterSet<T> & params);

/**
 * @brief One bias-corrected Adam update using the gradients stored in params.
 *
 * Throws DimensionError if the moment shapes do not match the parameters.
 */
template <typename T>
void adam_step(AdamState & state, ParameterSet<T> & params, double lr);

/**
 * @brief Linear warmup from 0 to peak_lr, then linear decay to 0 at total_steps.
 *
 * Steps outside [0, total_steps] are clamped to the nearest endpoint.
 */
struct LrSchedule
{
  double peak_lr = 3e-4;
  std::size_t warmup_steps = 200;
  std::size_t total_steps = 2000;

  /// Throws ConfigError unless 0 < warmup_steps < total_steps and peak_lr >= 0.
  void validate() const;
};

double lr_at(const LrSchedule & sched, long long step);

}  // namespace trajformer

#endif  // TRAJFORMER__OPTIM_HPP_
