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

#ifndef TRAJFORMER__CONFIG_HPP_
#define TRAJFORMER__CONFIG_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace trajformer
{

/**
 * @brief Encoder hyperparameters.
 *
 * pose_width is the single-layer pose projection width; model_dim is the
 * transformer token width. crop is the per-agent BEV crop side, split into
 * (crop/subpatch)^2 sub-patches.
 */
struct EncoderConfig
{
  std::size_t pose_width = 1024;
  std::size_t model_dim = 16;
  std::size_t heads = 2;
  std::size_t layers = 12;
  std::size_t latent_dim = 256;
  std::size_t subpatch = 16;
  std::size_t crop = 16;
  std::size_t mlp_ratio = 4;
  std::size_t channels = 3;
  std::size_t past_len = 6;
  double dropout = 0.0;
  bool per_timestep_patches = false;
  double position_scale = 0.1;  // 1/m, applied to agent-centered coordinates

  std::size_t subpatches() const { return (crop / subpatch) * (crop / subpatch); }
  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  friend bool operator==(const EncoderConfig &, const EncoderConfig &) = default;
};

/// Autoregressive affine flow decoder.
struct FlowConfig
{
  std::size_t future_len = 6;
  std::size_t hidden = 64;       // recurrent state width
  std::size_t head_hidden = 64;  // conditioning MLP width
  double sigma_floor = 1e-3;

  void validate() const;

  friend bool operator==(const FlowConfig &, const FlowConfig &) = default;
};

struct ModelConfig
{
  std::string name;
  EncoderConfig encoder;
  FlowConfig flow;

  void validate() const
  {
    encoder.validate();
    flow.validate();
  }

  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

/// Registered configuration names: tf12-ref, tf24-ref, paper-default.
std::vector<std::string> model_config_names();
/// Throws ConfigError for unknown names.
ModelConfig model_config(const std::string & name);

/// Trainable scalar count for a configuration (no allocation of weights).
std::size_t count_parameters(const ModelConfig & cfg);

nlohmann::json to_json(const ModelConfig & cfg);
ModelConfig model_config_from_json(const nlohmann::json & j);

}  // namespace trajformer

#endif  // TRAJFORMER__CONFIG_HPP_
