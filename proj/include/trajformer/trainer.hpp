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

#ifndef TRAJFORMER__TRAINER_HPP_
#define TRAJFORMER__TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trajformer/metrics.hpp"
#include "trajformer/model.hpp"
#include "trajformer/objective.hpp"
#include "trajformer/optim.hpp"
#include "trajformer/scene.hpp"

namespace trajformer
{

struct TrainConfig
{
  std::size_t batch_size = 128;
  std::size_t total_steps = 2000;
  std::size_t warmup_steps = 200;
  double peak_lr = 3e-4;
  double alpha = 0.5;
  std::size_t k_mc = 4;
  std::uint64_t seed = 0;

  /// Throws ConfigError on a zero batch, a bad schedule or a bad objective.
  void validate() const;
  LrSchedule schedule() const { return LrSchedule{peak_lr, warmup_steps, total_steps}; }
  ObjectiveConfig objective() const { return ObjectiveConfig{alpha, k_mc}; }

  friend bool operator==(const TrainConfig &, const TrainConfig &) = default;
};

nlohmann::json to_json(const TrainConfig & cfg);
TrainConfig train_config_from_json(const nlohmann::json & j);

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char * kManifestName = "manifest.json";

/// Weights, optimizer state and the configuration that produced them.
struct Checkpoint
{
  int version = kCheckpointVersion;
  ModelConfig model_config;
  ParameterSet<float> params;
  AdamState adam;
  TrainConfig train;
  std::uint64_t step = 0;

  Model<float> model() const { return Model<float>(model_config, params); }
};

struct LossRow
{
  std::size_t step = 0;
  double nll_term = 0.0;
  double prior_term = 0.0;
  double total = 0.0;
  double lr = 0.0;
};

/// "step,nll_term,prior_term,total,lr" followed by one row per entry.
std::string loss_curve_csv(const std::vector<LossRow> & rows);

struct TrainResult
{
  Checkpoint checkpoint;
  std::vector<LossRow> curve;
};

/**
 * @brief Minimizes the total loss for cfg.total_steps Adam updates.
 *
 * Row s of the curve (step s, 1-based) reports the loss of the batch used by
 * update s and lr_at(s), the rate that update applied. Batches are drawn
 * from a shuffled permutation when batch_size <= |dataset|, and uniformly
 * with replacement otherwise. Throws NumericError naming the step if the
 * loss becomes non-finite.
 */
TrainResult train(
  const std::vector<Scene> & dataset, const ModelConfig & model_cfg, const TrainConfig & cfg,
  const std::function<void(const LossRow &)> & on_step = {});

/// manifest.json plus one little-endian float32 file per tensor.
void save_checkpoint(const Checkpoint & ckpt, const std::filesystem::path & dir);

/**
 * @brief Reads a checkpoint directory.
 *
 * Throws FormatError on a version mismatch, a missing tensor, or a tensor
 * whose stored length or shape disagrees with the configuration.
 */
Checkpoint load_checkpoint(const std::filesystem::path & dir);

/// Seed used to sample scene `index` during evaluation.
std::uint64_t evaluation_seed(std::uint64_t seed, std::size_t index);

/// k hypotheses per agent per scene; scene_ids label the rows.
EvaluationReport evaluate(
  const Model<float> & model, const std::vector<Scene> & scenes,
  const std::vector<std::string> & scene_ids, std::size_t k, std::uint64_t seed);

}  // namespace trajformer

#endif  // TRAJFORMER__TRAINER_HPP_
