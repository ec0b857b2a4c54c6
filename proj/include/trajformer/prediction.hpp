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

#ifndef TRAJFORMER__PREDICTION_HPP_
#define TRAJFORMER__PREDICTION_HPP_

#include <string>
#include <vector>

#include "json.hpp"
#include "trajformer/flow.hpp"
#include "trajformer/metrics.hpp"
#include "trajformer/scene.hpp"

namespace trajformer
{

struct AgentPrediction
{
  std::string id;
  SampleSet samples;
  std::vector<double> log_probs;

  friend bool operator==(const AgentPrediction &, const AgentPrediction &) = default;
};

/// Contents of a prediction file.
struct Prediction
{
  std::string scene_id;
  std::vector<AgentPrediction> agents;

  friend bool operator==(const Prediction &, const Prediction &) = default;
};

SampleSet to_sample_set(const TrajectorySamples & s);

Prediction make_prediction(
  std::string scene_id, const Scene & scene, const std::vector<TrajectorySamples> & samples);

nlohmann::json to_json(const Prediction & p);

/**
 * @brief Checks a parsed document against the prediction schema.
 *
 * {scene_id: string, agents: [{id: string, samples: [[[x, y] x T] x k],
 * log_probs: [k numbers]}]}, with k >= 1 and T >= 1 shared by all agents,
 * unique agent ids and finite numbers. Throws FormatError naming the path.
 */
void validate_prediction_json(const nlohmann::json & j);

Prediction prediction_from_json(const nlohmann::json & j);

std::string prediction_to_string(const Prediction & p);

void save_prediction(const Prediction & p, const std::string & path);
Prediction load_prediction(const std::string & path);

}  // namespace trajformer

#endif  // TRAJFORMER__PREDICTION_HPP_
