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

#include "trajformer/config.hpp"

#include "trajformer/errors.hpp"

namespace trajformer
{

using nlohmann::json;

void EncoderConfig::validate() const
{
  if (pose_width == 0 || model_dim == 0 || latent_dim == 0 || channels == 0) {
    throw ConfigError("encoder: widths and channel count must be >= 1");
  }
  if (heads == 0 || model_dim % heads != 0) {
    throw ConfigError(
      "encoder: model_dim " + std::to_string(model_dim) + " is not divisible by heads " +
      std::to_string(heads));
  }
  if (model_dim % 4 != 0) {
    throw ConfigError("encoder: model_dim must be a multiple of 4 for the positional encoding");
  }
  if (layers == 0) {
    throw ConfigError("encoder: need at least one transformer layer");
  }
  if (subpatch == 0 || crop < 2 || crop % 2 != 0 || crop % subpatch != 0) {
    throw ConfigError(
      "encoder: sub-patch size " + std::to_string(subpatch) + " must divide the even crop size " +
      std::to_string(crop));
  }
  if (mlp_ratio == 0) {
    throw ConfigError("encoder: mlp_ratio must be >= 1");
  }
  if (past_len < 2) {
    throw ConfigError("encoder: need at least two past poses");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("encoder: dropout must lie in [0, 1)");
  }
  if (!(position_scale > 0.0)) {
    throw ConfigError("encoder: position_scale must be positive");
  }
}

void FlowConfig::validate() const
{
  if (future_len == 0 || hidden == 0 || head_hidden == 0) {
    throw ConfigError("flow: future_len, hidden and head_hidden must be >= 1");
  }
  if (!(sigma_floor > 0.0)) {
    throw ConfigError("flow: sigma_floor must be positive");
  }
}

std::vector<std::string> model_config_names()
{
  return {"tf12-ref", "tf24-ref", "paper-default"};
}

ModelConfig model_config(const std::string & name)
{
  ModelConfig cfg;
  cfg.name = name;
  // The reference configs keep pose_width = 1024, crop = 16 and latent_dim = 256
  // and trim the token width so the totals sit near 164K / 192K parameters.
  if (name == "tf12-ref") {
    cfg.encoder.layers = 12;
  } else if (name == "tf24-ref") {
    cfg.encoder.layers = 24;
  } else if (name == "paper-default") {
    cfg.encoder.layers = 12;
    cfg.encoder.model_dim = 64;
    cfg.encoder.heads = 4;
  } else {
    throw ConfigError("unknown model config '" + name + "' (expected tf12-ref, tf24-ref or paper-default)");
  }
  cfg.validate();
  return cfg;
}

json to_json(const ModelConfig & cfg)
{
  const EncoderConfig & e = cfg.encoder;
  const FlowConfig & f = cfg.flow;
  return json{
    {"name", cfg.name},
    {"encoder",
     {{"pose_width", e.pose_width},
      {"model_dim", e.model_dim},
      {"heads", e.heads},
      {"layers", e.layers},
      {"latent_dim", e.latent_dim},
      {"subpatch", e.subpatch},
      {"crop", e.crop},
      {"mlp_ratio", e.mlp_ratio},
      {"channels", e.channels},
      {"past_len", e.past_len},
      {"dropout", e.dropout},
      {"per_timestep_patches", e.per_timestep_patches},
      {"position_scale", e.position_scale}}},
    {"flow",
     {{"future_len", f.future_len},
      {"hidden", f.hidden},
      {"head_hidden", f.head_hidden},
      {"sigma_floor", f.sigma_floor}}}};
}

ModelConfig model_config_from_json(const json & j)
{
  try {
    ModelConfig cfg;
    cfg.name = j.at("name").get<std::string>();
    const json & e = j.at("encoder");
    cfg.encoder.pose_width = e.at("pose_width").get<std::size_t>();
    cfg.encoder.model_dim = e.at("model_dim").get<std::size_t>();
    cfg.encoder.heads = e.at("heads").get<std::size_t>();
    cfg.encoder.layers = e.at("layers").get<std::size_t>();
    cfg.encoder.latent_dim = e.at("latent_dim").get<std::size_t>();
    cfg.encoder.subpatch = e.at("subpatch").get<std::size_t>();
    cfg.encoder.crop = e.at("crop").get<std::size_t>();
    cfg.encoder.mlp_ratio = e.at("mlp_ratio").get<std::size_t>();
    cfg.encoder.channels = e.at("channels").get<std::size_t>();
    cfg.encoder.past_len = e.at("past_len").get<std::size_t>();
    cfg.encoder.dropout = e.at("dropout").get<double>();
    cfg.encoder.per_timestep_patches = e.at("per_timestep_patches").get<bool>();
    cfg.encoder.position_scale = e.at("position_scale").get<double>();
    const json & f = j.at("flow");
    cfg.flow.future_len = f.at("future_len").get<std::size_t>();
    cfg.flow.hidden = f.at("hidden").get<std::size_t>();
    cfg.flow.head_hidden = f.at("head_hidden").get<std::size_t>();
    cfg.flow.sigma_floor = f.at("sigma_floor").get<double>();
    cfg.validate();
    return cfg;
  } catch (const json::exception & ex) {
    throw FormatError(std::string("model config: ") + ex.what());
  }
}

}  // namespace trajformer
