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

#ifndef TRAJFORMER__METRICS_HPP_
#define TRAJFORMER__METRICS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "trajformer/scene.hpp"

namespace trajformer
{

/// k hypotheses, each T poses.
using SampleSet = std::vector<Trajectory>;

/// Min over samples of the mean Euclidean distance to gt.
double min_ade(const SampleSet & samples, const Trajectory & gt);

/// Min over samples of the final-step Euclidean distance to gt.
double min_fde(const SampleSet & samples, const Trajectory & gt);

/// Mean final distance over min final distance; 1 when the min is 0.
double rf(const SampleSet & samples, const Trajectory & gt);

/**
 * @brief Distinct drivable cells hit by any point, over drivable cells, x 1e4.
 *
 * Points outside the grid are ignored. Throws ConfigError if the mask has no
 * drivable cell.
 */
double dao(const std::vector<SampleSet> & sets, const DrivableMask & mask);

/// Fraction of samples whose every point lies on a drivable cell (off-grid counts as not drivable).
double dac(const SampleSet & samples, const DrivableMask & mask);

struct MetricsReport
{
  std::string scene_id;
  double min_ade = 0.0;
  double min_fde = 0.0;
  double rf = 1.0;
  double dao = 0.0;
  double dac = 1.0;
  std::size_t k = 0;

  friend bool operator==(const MetricsReport &, const MetricsReport &) = default;
};

/**
 * @brief Scene-level report from per-agent sample sets.
 *
 * minADE, minFDE and rF are averaged over agents; DAO pools every agent's
 * points and DAC pools every agent's samples.
 */
MetricsReport evaluate_scene(
  const std::vector<SampleSet> & per_agent, const Scene & scene, std::string scene_id = {});

/// Field-wise mean of scene reports; scene_id is "aggregate".
MetricsReport aggregate(const std::vector<MetricsReport> & reports);

struct EvaluationReport
{
  std::vector<MetricsReport> per_scene;
  MetricsReport aggregate;

  friend bool operator==(const EvaluationReport &, const EvaluationReport &) = default;
};

EvaluationReport make_evaluation_report(std::vector<MetricsReport> per_scene);

nlohmann::json to_json(const MetricsReport & r);
nlohmann::json to_json(const EvaluationReport & r);

/// Header plus one row per scene and a final "aggregate" row.
std::string to_csv(const EvaluationReport & r);

}  // namespace trajformer

#endif  // TRAJFORMER__METRICS_HPP_
