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

#ifndef TRAJFORMER__MODEL_HPP_
#define TRAJFORMER__MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "trajformer/config.hpp"
#include "trajformer/optim.hpp"
#include "trajformer/tape.hpp"

namespace trajformer
{

enum class Init { kUniform, kZeros, kOnes };

/// Name, shape and initializer of one trainable tensor.
struct ParamSpec
{
  std::string name;
  Shape shape;
  Init init = Init::kZeros;
  std::size_t fan_in = 1;
};

/// Canonical parameter list; its order is the ParameterSet order.
std::vector<ParamSpec> parameter_specs(const ModelConfig & cfg);

struct LayerSlots
{
  std::size_t ln1_gain, ln1_bias;
  std::size_t wq, bq, wk, bk, wv, bv, wo, bo;
  std::size_t ln2_gain, ln2_bias;
  std::size_t mlp_w1, mlp_b1, mlp_w2, mlp_b2;
};

struct EncoderSlots
{
  std::size_t pose_w, pose_b;    // 2 -> pose_width
  std::size_t token_w, token_b;  // pose_width -> model_dim
  std::size_t patch_w, patch_b;  // subpatch^2 * C -> model_dim
  std::vector<LayerSlots> layers;
  std::size_t final_gain, final_bias;
  std::size_t latent_w, latent_b;  // model_dim -> latent_dim
};

// The recurrent update and the conditioning head both consume
// [code ; state ; hidden]; their weight matrices are stored split by input
// block so the code block can be projected once per agent.
struct FlowSlots
{
  std::size_t gru_code, gru_state, gru_hidden, gru_bias_in, gru_bias_hidden;
  std::size_t head_code, head_state, head_hidden, head_bias;
  std::size_t out_w, out_b;  // head_hidden -> 5
};

struct ParamLayout
{
  EncoderSlots encoder;
  FlowSlots flow;
};

ParamLayout make_layout(const ModelConfig & cfg);

/// Number of raw outputs of the conditioning network per step.
inline constexpr std::size_t kFlowRawOutputs = 5;
/// Width of the per-step state input [s_prev ; s_prev - s_prev2].
inline constexpr std::size_t kFlowStateInputs = 4;

/**
 * @brief Configuration plus weights.
 *
 * Weights are drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases start at
 * zero and layer-norm gains at one.
 */
template <typename T>
class Model
{
public:
  /// Throws FormatError if names or shapes differ from parameter_specs(cfg).
  Model(ModelConfig cfg, ParameterSet<T> params);

  static Model initialized(const ModelConfig & cfg, std::uint64_t seed);

  const ModelConfig & config() const { return config_; }
  const ParamLayout & layout() const { return layout_; }
  ParameterSet<T> & params() { return params_; }
  const ParameterSet<T> & params() const { return params_; }

private:
  ModelConfig config_;
  ParamLayout layout_;
  ParameterSet<T> params_;
};

/// Every parameter of a model recorded as a leaf on one tape.
template <typename T>
struct Bound
{
  const Model<T> * model = nullptr;
  Tape<T> * tape = nullptr;
  std::vector<Var<T>> vars;

  Var<T> operator[](std::size_t slot) const { return vars[slot]; }
  const ModelConfig & config() const { return model->config(); }
  const ParamLayout & layout() const { return model->layout(); }
};

template <typename T>
Bound<T> bind(Tape<T> & tape, const Model<T> & model, bool requires_grad);

/// Adds the tape gradients of bound leaves into `grads` (same order as the model).
template <typename T>
void accumulate_grads(const Bound<T> & bound, ParameterSet<T> & grads);

}  // namespace trajformer

#endif  // TRAJFORMER__MODEL_HPP_
