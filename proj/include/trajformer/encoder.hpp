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

#ifndef TRAJFORMER__ENCODER_HPP_
#define TRAJFORMER__ENCODER_HPP_

#include <cstddef>
#include <vector>

#include "trajformer/model.hpp"
#include "trajformer/rng.hpp"
#include "trajformer/scene.hpp"

namespace trajformer
{

template <typename T>
struct PoseEmbedding
{
  Var<T> projected;  // n x pose_width
  Var<T> tokens;     // n x model_dim
};

/**
 * @brief Single-layer pose projection followed by the map to token width.
 *
 * `rel_past` holds agent-centered poses in meters (n x 2); they are scaled by
 * position_scale before projection.
 */
template <typename T>
PoseEmbedding<T> embed_poses(const Bound<T> & w, const Tensor<T> & rel_past);

/// Splits an m x m x C crop into sub-patches and projects each to model_dim.
template <typename T>
Var<T> embed_patches(const Bound<T> & w, const Tensor<float> & patch);

/**
 * @brief Sinusoidal encoding of a scene-frame position and a time index.
 *
 * The first half encodes (distance from origin, x, y) at geometric
 * frequencies from 1 to 0.01 rad/m; the second half encodes the time index
 * with the usual 10000^(-2j/n) ladder. Entries alternate sin, cos.
 */
template <typename T>
Tensor<T> pos_encode(const Pose & position, std::size_t time_index, const EncoderConfig & cfg);

/// e_obs * (pos + patch), elementwise.
template <typename T>
Var<T> fuse(Var<T> e_obs, Var<T> patch_term, Var<T> pos);

struct EncodeOptions
{
  Rng * dropout_rng = nullptr;  // null: dropout disabled (inference)
};

/// Optional capture of each head's attention matrix, layer-major.
template <typename T>
struct AttentionProbe
{
  std::vector<Tensor<T>> weights;
};

/**
 * @brief Pre-norm transformer over all A*t tokens, then per-agent readout.
 *
 * Tokens are agent-major (row a*t + i). The final-norm token at each agent's
 * latest time index is projected to latent_dim, giving A x D codes.
 */
template <typename T>
Var<T> encode(
  const Bound<T> & w, Var<T> tokens, std::size_t agents, const EncodeOptions & opts = {},
  AttentionProbe<T> * probe = nullptr);

/// Fused A*t x model_dim token sequence for a scene.
template <typename T>
Var<T> build_tokens(const Bound<T> & w, const Scene & scene);

/// build_tokens followed by encode: A x latent_dim.
template <typename T>
Var<T> encode_scene(
  const Bound<T> & w, const Scene & scene, const EncodeOptions & opts = {},
  AttentionProbe<T> * probe = nullptr);

}  // namespace trajformer

#endif  // TRAJFORMER__ENCODER_HPP_
