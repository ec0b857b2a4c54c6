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

#ifndef TRAJFORMER__OBJECTIVE_HPP_
#define TRAJFORMER__OBJECTIVE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trajformer/model.hpp"
#include "trajformer/scene.hpp"

namespace trajformer
{

struct LossBreakdown
{
  double nll_term = 0.0;    // nats per agent
  double prior_term = 0.0;  // nats per agent, draw and step
  double total = 0.0;
  double alpha = 0.0;
};

struct ObjectiveConfig
{
  double alpha = 0.5;
  std::size_t k_mc = 4;

  /// Throws ConfigError for alpha < 0 or k_mc == 0.
  void validate() const;
};

/// log p-hat at each row of `positions` (B x 2), differentiable in the positions.
template <typename T>
Var<T> prior_log_prob(Var<T> positions, const PriorGrid & prior);

/// Per-scene sums; dividing by the batch agent count gives the batch terms.
template <typename T>
struct SceneTerms
{
  Var<T> nll_sum;    // sum over agents of -log q(ground truth)
  Var<T> prior_sum;  // sum over agents of the mean -log p-hat over draws and steps
  std::size_t agents = 0;
};

/**
 * @brief Both loss terms of one scene on the tape of `w`.
 *
 * `mc_noise` is (A * k_mc) x 2T, row a*k_mc + j for draw j of agent a.
 */
template <typename T>
SceneTerms<T> scene_terms(
  const Bound<T> & w, const Scene & scene, std::size_t k_mc, const Tensor<T> & mc_noise);

/// Reparameterization noise for scene `scene_index` of a batch.
Tensor<double> mc_noise(
  std::uint64_t seed, std::size_t scene_index, std::size_t agents, std::size_t k_mc,
  std::size_t steps);

/**
 * @brief nll_term + alpha * prior_term over a batch.
 *
 * Both terms are means over all agents of the batch. When `grads` is given,
 * d(total)/d(weights) is added into it (scenes reduced in batch order).
 */
template <typename T>
LossBreakdown total_loss(
  const Model<T> & model, const std::vector<const Scene *> & batch, const ObjectiveConfig & cfg,
  std::uint64_t seed, ParameterSet<T> * grads = nullptr);

template <typename T>
double nll_term(const Model<T> & model, const std::vector<const Scene *> & batch);

template <typename T>
double prior_term(
  const Model<T> & model, const std::vector<const Scene *> & batch, std::size_t k_mc,
  std::uint64_t seed);

}  // namespace trajformer

#endif  // TRAJFORMER__OBJECTIVE_HPP_
