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

#include "trajformer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "trajformer/errors.hpp"

namespace trajformer
{

namespace
{

double distance(const Pose & a, const Pose & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

void check_samples(const SampleSet & samples, const Trajectory & gt, const char * what)
{
  if (samples.empty()) {
    throw DimensionError(std::string(what) + ": need at least one sample");
  }
  if (gt.empty()) {
    throw DimensionError(std::string(what) + ": empty ground truth");
  }
  for (const auto & s : samples) {
    if (s.size() != gt.size()) {
      throw DimensionError(
        std::string(what) + ": sample has " + std::to_string(s.size()) + " steps, ground truth " +
        std::to_string(gt.size()));
    }
  }
}

std::vector<double> final_distances(const SampleSet & samples, const Trajectory & gt)
{
  std::vector<double> d;
  d.reserve(samples.size());
  for (const auto & s : samples) {
    d.push_back(distance(s.back(), gt.back()));
  }
  return d;
}

std::string format_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double min_ade(const SampleSet & samples, const Trajectory & gt)
{
  check_samples(samples, gt, "min_ade");
  double best = std::numeric_limits<double>::infinity();
  for (const auto & s : samples) {
    double sum = 0.0;
    for (std::size_t t = 0; t < gt.size(); ++t) {
      sum += distance(s[t], gt[t]);
    }
    best = std::min(best, sum / static_cast<double>(gt.size()));
  }
  return best;
}

double min_fde(const SampleSet & samples, const Trajectory & gt)
{
  check_samples(samples, gt, "min_fde");
  const auto d = final_distances(samples, gt);
  return *std::min_element(d.begin(), d.end());
}

double rf(const SampleSet & samples, const Trajectory & gt)
{
  check_samples(samples, gt, "rf");
  const auto d = final_distances(samples, gt);
  const double lo = *std::min_element(d.begin(), d.end());
  if (lo == 0.0) {
    return 1.0;
  }
  double sum = 0.0;
  for (double v : d) {
    sum += v;
  }
  return sum / static_cast<double>(d.size()) / lo;
}

double dao(const std::vector<SampleSet> & sets, const DrivableMask & mask)
{
  const std::size_t drivable = mask.drivable_count();
  if (drivable == 0) {
    throw ConfigError("dao: mask has no drivable cells");
  }
  std::set<std::size_t> hit;
  for (const auto & set : sets) {
    for (const auto & traj : set) {
      for (const auto & p : traj) {
        const auto cell = mask.grid.cell_of(p);
        if (cell && mask.drivable(cell->first, cell->second)) {
          hit.insert(cell->first * mask.grid.width + cell->second);
        }
      }
    }
  }
  return static_cast<double>(hit.size()) / static_cast<double>(drivable) * 1e4;
}

double dac(const SampleSet & samples, const DrivableMask & mask)
{
  if (samples.empty()) {
    throw DimensionError("dac: need at least one sample");
  }
  std::size_t ok = 0;
  for (const auto & s : samples) {
    ok += std::all_of(s.begin(), s.end(), [&](const Pose & p) { return mask.drivable_at(p); });
  }
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

MetricsReport evaluate_scene(
  const std::vector<SampleSet> & per_agent, const Scene & scene, std::string scene_id)
{
  if (per_agent.size() != scene.tracks.size() || per_agent.empty()) {
    throw DimensionError(
      "evaluate_scene: " + std::to_string(per_agent.size()) + " sample sets for " +
      std::to_string(scene.tracks.size()) + " agents");
  }
  MetricsReport r;
  r.scene_id = std::move(scene_id);
  r.k = per_agent[0].size();
  double ade = 0.0;
  double fde = 0.0;
  double ratio = 0.0;
  SampleSet pooled;
  for (std::size_t a = 0; a < per_agent.size(); ++a) {
    if (per_agent[a].size() != r.k) {
      throw DimensionError("evaluate_scene: agents have different sample counts");
    }
    const Trajectory & gt = scene.tracks[a].future;
    ade += min_ade(per_agent[a], gt);
    fde += min_fde(per_agent[a], gt);
    ratio += rf(per_agent[a], gt);
    pooled.insert(pooled.end(), per_agent[a].begin(), per_agent[a].end());
  }
  const double n = static_cast<double>(per_agent.size());
  r.min_ade = ade / n;
  r.min_fde = fde / n;
  r.rf = ratio / n;
  r.dao = dao(per_agent, scene.mask);
  r.dac = dac(pooled, scene.mask);
  return r;
}

MetricsReport aggregate(const std::vector<MetricsReport> & reports)
{
  MetricsReport out;
  out.scene_id = "aggregate";
  if (reports.empty()) {
    return out;
  }
  out.rf = 0.0;
  out.dac = 0.0;
  out.k = reports[0].k;
  for (const auto & r : reports) {
    out.min_ade += r.min_ade;
    out.min_fde += r.min_fde;
    out.rf += r.rf;
    out.dao += r.dao;
    out.dac += r.dac;
  }
  const double n = static_cast<double>(reports.size());
  out.min_ade /= n;
  out.min_fde /= n;
  out.rf /= n;
  out.dao /= n;
  out.dac /= n;
  return out;
}

EvaluationReport make_evaluation_report(std::vector<MetricsReport> per_scene)
{
  EvaluationReport r;
  r.aggregate = aggregate(per_scene);
  r.per_scene = std::move(per_scene);
  return r;
}

nlohmann::json to_json(const MetricsReport & r)
{
  return nlohmann::json{
    {"scene_id", r.scene_id}, {"min_ade", r.min_ade}, {"min_fde", r.min_fde}, {"rf", r.rf},
    {"dao", r.dao},           {"dac", r.dac},         {"k", r.k}};
}

nlohmann::json to_json(const EvaluationReport & r)
{
  nlohmann::json scenes = nlohmann::json::array();
  for (const auto & s : r.per_scene) {
    scenes.push_back(to_json(s));
  }
  return nlohmann::json{{"per_scene", scenes}, {"aggregate", to_json(r.aggregate)}};
}

std::string to_csv(const EvaluationReport & r)
{
  std::string out = "scene_id,min_ade,min_fde,rf,dao,dac,k\n";
  auto row = [&out](const MetricsReport & m) {
    out += m.scene_id + "," + format_number(m.min_ade) + "," + format_number(m.min_fde) + "," +
           format_number(m.rf) + "," + format_number(m.dao) + "," + format_number(m.dac) + "," +
           std::to_string(m.k) + "\n";
  };
  for (const auto & s : r.per_scene) {
    row(s);
  }
  row(r.aggregate);
  return out;
}

}  // namespace trajformer
