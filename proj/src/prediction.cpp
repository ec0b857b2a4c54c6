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

#include "trajformer/prediction.hpp"

#include <cmath>
#include <set>

#include "binary.hpp"
#include "trajformer/errors.hpp"

namespace trajformer
{

using nlohmann::json;

namespace
{

[[noreturn]] void fail(const std::string & path, const std::string & what)
{
  throw FormatError("prediction: " + path + ": " + what);
}

void require_keys(const json & j, const std::string & path, std::initializer_list<const char *> keys)
{
  if (!j.is_object()) {
    fail(path.empty() ? "<root>" : path, "expected an object");
  }
  for (const char * k : keys) {
    if (!j.contains(k)) {
      fail(path.empty() ? std::string(k) : path + "." + k, "missing field");
    }
  }
  for (const auto & item : j.items()) {
    bool known = false;
    for (const char * k : keys) {
      known = known || item.key() == k;
    }
    if (!known) {
      fail(path.empty() ? item.key() : path + "." + item.key(), "unknown field");
    }
  }
}

void require_number(const json & j, const std::string & path)
{
  if (!j.is_number() || !std::isfinite(j.get<double>())) {
    fail(path, "expected a finite number");
  }
}

}  // namespace

SampleSet to_sample_set(const TrajectorySamples & s)
{
  const std::size_t k = s.positions.dim(0);
  const std::size_t steps = s.positions.dim(1);
  SampleSet out(k, Trajectory(steps));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t t = 0; t < steps; ++t) {
      out[j][t] = Pose{s.positions[(j * steps + t) * 2], s.positions[(j * steps + t) * 2 + 1]};
    }
  }
  return out;
}

Prediction make_prediction(
  std::string scene_id, const Scene & scene, const std::vector<TrajectorySamples> & samples)
{
  if (samples.size() != scene.tracks.size()) {
    throw DimensionError("make_prediction: sample sets do not match the scene's agents");
  }
  Prediction p;
  p.scene_id = std::move(scene_id);
  for (std::size_t a = 0; a < samples.size(); ++a) {
    p.agents.push_back(
      AgentPrediction{scene.tracks[a].id, to_sample_set(samples[a]), samples[a].log_probs});
  }
  return p;
}

json to_json(const Prediction & p)
{
  json agents = json::array();
  for (const auto & a : p.agents) {
    json samples = json::array();
    for (const auto & traj : a.samples) {
      json pts = json::array();
      for (const auto & pose : traj) {
        pts.push_back(json::array({pose.x, pose.y}));
      }
      samples.push_back(std::move(pts));
    }
    agents.push_back({{"id", a.id}, {"samples", std::move(samples)}, {"log_probs", a.log_probs}});
  }
  return json{{"scene_id", p.scene_id}, {"agents", std::move(agents)}};
}

void validate_prediction_json(const json & j)
{
  require_keys(j, "", {"scene_id", "agents"});
  if (!j["scene_id"].is_string()) {
    fail("scene_id", "expected a string");
  }
  const json & agents = j["agents"];
  if (!agents.is_array() || agents.empty()) {
    fail("agents", "expected a non-empty array");
  }
  std::set<std::string> ids;
  std::size_t k = 0;
  std::size_t steps = 0;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const std::string ap = "agents[" + std::to_string(a) + "]";
    require_keys(agents[a], ap, {"id", "samples", "log_probs"});
    if (!agents[a]["id"].is_string()) {
      fail(ap + ".id", "expected a string");
    }
    if (!ids.insert(agents[a]["id"].get<std::string>()).second) {
      fail(ap + ".id", "duplicate agent id");
    }
    const json & samples = agents[a]["samples"];
    if (!samples.is_array() || samples.empty()) {
      fail(ap + ".samples", "expected a non-empty array");
    }
    if (a == 0) {
      k = samples.size();
    } else if (samples.size() != k) {
      fail(ap + ".samples", "expected " + std::to_string(k) + " samples like agents[0]");
    }
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const std::string sp = ap + ".samples[" + std::to_string(s) + "]";
      if (!samples[s].is_array() || samples[s].empty()) {
        fail(sp, "expected a non-empty array of points");
      }
      if (steps == 0) {
        steps = samples[s].size();
      } else if (samples[s].size() != steps) {
        fail(sp, "expected " + std::to_string(steps) + " points");
      }
      for (std::size_t t = 0; t < samples[s].size(); ++t) {
        const std::string pp = sp + "[" + std::to_string(t) + "]";
        const json & pt = samples[s][t];
        if (!pt.is_array() || pt.size() != 2) {
          fail(pp, "expected [x, y]");
        }
        require_number(pt[0], pp + "[0]");
        require_number(pt[1], pp + "[1]");
      }
    }
    const json & lps = agents[a]["log_probs"];
    if (!lps.is_array() || lps.size() != k) {
      fail(ap + ".log_probs", "expected " + std::to_string(k) + " numbers");
    }
    for (std::size_t s = 0; s < lps.size(); ++s) {
      require_number(lps[s], ap + ".log_probs[" + std::to_string(s) + "]");
    }
  }
}

Prediction prediction_from_json(const json & j)
{
  validate_prediction_json(j);
  Prediction p;
  p.scene_id = j["scene_id"].get<std::string>();
  for (const auto & a : j["agents"]) {
    AgentPrediction ap;
    ap.id = a["id"].get<std::string>();
    for (const auto & s : a["samples"]) {
      Trajectory traj;
      for (const auto & pt : s) {
        traj.push_back(Pose{pt[0].get<double>(), pt[1].get<double>()});
      }
      ap.samples.push_back(std::move(traj));
    }
    ap.log_probs = a["log_probs"].get<std::vector<double>>();
    p.agents.push_back(std::move(ap));
  }
  return p;
}

std::string prediction_to_string(const Prediction & p)
{
  return to_json(p).dump(1) + "\n";
}

void save_prediction(const Prediction & p, const std::string & path)
{
  detail::write_text_file(path, prediction_to_string(p));
}

Prediction load_prediction(const std::string & path)
{
  const std::string text = detail::read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error & e) {
    throw FormatError("prediction: " + path + ": " + e.what());
  }
  return prediction_from_json(j);
}

}  // namespace trajformer
