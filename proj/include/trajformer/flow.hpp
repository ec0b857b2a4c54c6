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

#ifndef TRAJFORMER__FLOW_HPP_
#define TRAJFORMER__FLOW_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trajformer/model.hpp"
#include "trajformer/scene.hpp"

namespace trajformer
{

/**
 * @brief Batched decoder inputs that stay fixed across steps.
 *
 * Row b of every tensor belongs to agent rows[b]; several rows may share an
 * agent (one per sampled hypothesis).
 */
template <typename T>
struct FlowContext
{
  const Bound<T> * bound = nullptr;
  Var<T> code_gru;    // B x 3H, code block of the recurrent update
  Var<T> code_head;   // B x head_hidden, code block of the conditioning head
  Tensor<T> anchor;   // B x 2, latest observed pose
  Tensor<T> prev2;    // B x 2, second-latest observed pose
  std::size_t batch() const { return anchor.rows(); }
};

/**
 * @brief Builds the decoder context for `codes` (A x D).
 *
 * `past` holds each agent's observed trajectory (at least two poses); `rows`
 * maps batch rows to agents. An empty `rows` means one row per agent.
 */
template <typename T>
FlowContext<T> make_flow_context(
  const Bound<T> & w, Var<T> codes, const std::vector<Trajectory> & past,
  std::vector<std::size_t> rows = {});

/// Per-step affine parameters: mu (B x 2) and the Cholesky entries of sigma (B x 1 each).
template <typename T>
struct FlowStep
{
  Var<T> mu;
  Var<T> l00, l10, l11;
  Var<T> hidden;  // B x H after the update
};

/**
 * @brief One conditioning step.
 *
 * The network sees [code ; scale*(s_prev - anchor) ; scale*(s_prev - s_prev2) ; h]
 * and emits 5 raw values (mu_hat, sigma entries). mu = 2 s_prev - s_prev2 + mu_hat;
 * diag(sigma) = softplus(raw) + sigma_floor.
 */
template <typename T>
FlowStep<T> decode_step(const FlowContext<T> & ctx, Var<T> s_prev, Var<T> s_prev2, Var<T> hidden);

/// Zero recurrent state for a context.
template <typename T>
Var<T> initial_hidden(const FlowContext<T> & ctx);

/// s = sigma z + mu for B x 2 noise.
template <typename T>
Var<T> flow_forward(const FlowStep<T> & step, Var<T> z);

/// z = sigma^-1 (s - mu).
template <typename T>
Var<T> flow_inverse(const FlowStep<T> & step, Var<T> s);

/// Per-row -0.5 |z|^2 - log(2 pi) - log det sigma (B x 1).
template <typename T>
Var<T> step_log_density(const FlowStep<T> & step, Var<T> z);

template <typename T>
struct TeacherForced
{
  Var<T> log_prob;  // B x 1, summed over steps
  Tensor<T> z;      // B x 2T recovered noise, step-major per row
};

/**
 * @brief Exact log-likelihood of observed futures under teacher forcing.
 *
 * futures[b] is the trajectory of batch row b; each step conditions on the
 * observed previous positions.
 */
template <typename T>
TeacherForced<T> teacher_forced(const FlowContext<T> & ctx, const std::vector<Trajectory> & futures);

template <typename T>
struct Rollout
{
  std::vector<Var<T>> positions;  // T entries, each B x 2
  Var<T> log_prob;                // B x 1
};

/**
 * @brief Free-running generation from noise z (B x 2T, step-major per row).
 *
 * Positions stay on the tape, so the result is differentiable with respect
 * to the weights (reparameterized sampling).
 */
template <typename T>
Rollout<T> rollout(const FlowContext<T> & ctx, const Tensor<T> & z);

/// k sampled futures of one agent.
struct TrajectorySamples
{
  Tensor<double> positions;       // k x T x 2
  Tensor<double> z;               // k x T x 2
  std::vector<double> log_probs;  // k
};

/**
 * @brief Standard-normal draws for A agents x k hypotheses x T steps.
 *
 * Row a*k + j comes from substream(seed, "z", {a, j}), so any subset of
 * agents or draws can be regenerated independently.
 */
Tensor<double> draw_noise(std::uint64_t seed, std::size_t agents, std::size_t k, std::size_t steps);

/// Decodes every agent of `scene` from the given noise (A*k x 2T).
template <typename T>
std::vector<TrajectorySamples> sample_with_noise(
  const Model<T> & model, const Scene & scene, std::size_t k, const Tensor<double> & z);

/// k hypotheses per agent drawn with draw_noise(seed, ...).
template <typename T>
std::vector<TrajectorySamples> sample(
  const Model<T> & model, const Scene & scene, std::size_t k, std::uint64_t seed);

/// Teacher-forced log q(future | past) of every agent's ground truth.
template <typename T>
std::vector<double> ground_truth_log_prob(const Model<T> & model, const Scene & scene);

}  // namespace trajformer

#endif  // TRAJFORMER__FLOW_HPP_
