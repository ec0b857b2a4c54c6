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

#include "trajformer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "binary.hpp"
#include "trajformer/errors.hpp"
#include "trajformer/flow.hpp"
#include "trajformer/prediction.hpp"
#include "trajformer/rng.hpp"

namespace trajformer
{

using nlohmann::json;

namespace
{

std::string format_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class BatchSampler
{
public:
  BatchSampler(std::size_t n, std::size_t batch, std::uint64_t seed)
  : n_(n), batch_(batch), rng_(substream(seed, "shuffle")), order_(n)
  {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    cursor_ = n_;
  }

  std::vector<std::size_t> next()
  {
    std::vector<std::size_t> out;
    if (batch_ > n_) {
      std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
      for (std::size_t i = 0; i < batch_; ++i) {
        out.push_back(pick(rng_));
      }
      return out;
    }
    if (cursor_ + batch_ > n_) {
      std::shuffle(order_.begin(), order_.end(), rng_);
      cursor_ = 0;
    }
    out.assign(order_.begin() + cursor_, order_.begin() + cursor_ + batch_);
    cursor_ += batch_;
    return out;
  }

private:
  std::size_t n_;
  std::size_t batch_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_;
};

json shape_json(const Shape & s)
{
  return json(std::vector<std::size_t>(s.begin(), s.end()));
}

std::string tensor_file(const std::string & name)
{
  return name + ".bin";
}

void write_tensor(const std::filesystem::path & dir, const std::string & name, const Tensor<float> & t)
{
  const auto bytes = detail::floats_to_le_bytes(t.data());
  detail::write_file(dir / tensor_file(name), bytes.data(), bytes.size());
}

Tensor<float> read_tensor(const std::filesystem::path & dir, const std::string & name, const Shape & shape)
{
  const auto path = dir / tensor_file(name);
  if (!std::filesystem::exists(path)) {
    throw FormatError("checkpoint: missing tensor '" + name + "' (" + path.string() + ")");
  }
  std::vector<float> values = detail::le_bytes_to_floats(detail::read_binary_file(path));
  if (values.size() != shape_size(shape)) {
    throw FormatError(
      "checkpoint: tensor '" + name + "' holds " + std::to_string(values.size()) +
      " values but shape " + shape_string(shape) + " requires " + std::to_string(shape_size(shape)));
  }
  return Tensor<float>(shape, std::move(values));
}

const json & manifest_field(const json & j, const char * key)
{
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("checkpoint: manifest is missing '") + key + "'");
  }
  return j[key];
}

}  // namespace

void TrainConfig::validate() const
{
  if (batch_size == 0) {
    throw ConfigError("train: batch_size must be >= 1");
  }
  schedule().validate();
  objective().validate();
}

json to_json(const TrainConfig & c)
{
  return json{{"batch_size", c.batch_size}, {"total_steps", c.total_steps},
              {"warmup_steps", c.warmup_steps}, {"peak_lr", c.peak_lr},
              {"alpha", c.alpha}, {"k_mc", c.k_mc}, {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json & j)
{
  try {
    TrainConfig c;
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.total_steps = j.at("total_steps").get<std::size_t>();
    c.warmup_steps = j.at("warmup_steps").get<std::size_t>();
    c.peak_lr = j.at("peak_lr").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.k_mc = j.at("k_mc").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const json::exception & e) {
    throw FormatError(std::string("train config: ") + e.what());
  }
}

std::string loss_curve_csv(const std::vector<LossRow> & rows)
{
  std::string out = "step,nll_term,prior_term,total,lr\n";
  for (const auto & r : rows) {
    out += std::to_string(r.step) + "," + format_number(r.nll_term) + "," +
           format_number(r.prior_term) + "," + format_number(r.total) + "," + format_number(r.lr) +
           "\n";
  }
  return out;
}

TrainResult train(
  const std::vector<Scene> & dataset, const ModelConfig & model_cfg, const TrainConfig & cfg,
  const std::function<void(const LossRow &)> & on_step)
{
  cfg.validate();
  if (dataset.empty()) {
    throw ConfigError("train: dataset is empty");
  }
  Model<float> model = Model<float>::initialized(model_cfg, cfg.seed);
  AdamState adam = make_adam_state(model.params());
  const LrSchedule sched = cfg.schedule();
  const ObjectiveConfig obj = cfg.objective();
  BatchSampler sampler(dataset.size(), cfg.batch_size, cfg.seed);
  TrainResult result;
  result.curve.reserve(cfg.total_steps);
  for (std::size_t s = 0; s < cfg.total_steps; ++s) {
    std::vector<const Scene *> batch;
    for (std::size_t i : sampler.next()) {
      batch.push_back(&dataset[i]);
    }
    model.params().zero_grad();
    const std::uint64_t mc_seed = substream(cfg.seed, "mc", {s})();
    LossBreakdown loss;
    try {
      loss = total_loss(model, batch, obj, mc_seed, &model.params());
    } catch (const NumericError & e) {
      throw NumericError("train: non-finite value at step " + std::to_string(s + 1) + ": " + e.what());
    }
    if (!std::isfinite(loss.total)) {
      throw NumericError("train: non-finite loss at step " + std::to_string(s + 1));
    }
    for (const auto & p : model.params()) {
      if (!p.grad.all_finite()) {
        throw NumericError(
          "train: non-finite gradient for '" + p.name + "' at step " + std::to_string(s + 1));
      }
    }
    const double lr = lr_at(sched, static_cast<long long>(s + 1));
    adam_step(adam, model.params(), lr);
    LossRow row{s + 1, loss.nll_term, loss.prior_term, loss.total, lr};
    result.curve.push_back(row);
    if (on_step) {
      on_step(row);
    }
  }
  Checkpoint & c = result.checkpoint;
  c.model_config = model_cfg;
  for (const auto & p : model.params()) {
    c.params.add(p.name, p.value);
  }
  c.adam = std::move(adam);
  c.train = cfg;
  c.step = cfg.total_steps;
  return result;
}

void save_checkpoint(const Checkpoint & ckpt, const std::filesystem::path & dir)
{
  std::filesystem::create_directories(dir);
  const bool has_moments = ckpt.adam.m.size() == ckpt.params.size();
  json tensors = json::array();
  json moments = json::array();
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    const auto & p = ckpt.params[i];
    tensors.push_back(
      {{"name", p.name}, {"shape", shape_json(p.value.shape())}, {"dtype", "float32"},
       {"file", tensor_file(p.name)}});
    write_tensor(dir, p.name, p.value);
    if (has_moments) {
      for (const char * kind : {"m", "v"}) {
        const std::string name = std::string("adam.") + kind + "." + p.name;
        const Tensor<float> & t = kind[0] == 'm' ? ckpt.adam.m[i] : ckpt.adam.v[i];
        moments.push_back(
          {{"name", name}, {"shape", shape_json(t.shape())}, {"dtype", "float32"},
           {"file", tensor_file(name)}});
        write_tensor(dir, name, t);
      }
    }
  }
  json manifest{
    {"version", ckpt.version},
    {"model", to_json(ckpt.model_config)},
    {"train", to_json(ckpt.train)},
    {"step", ckpt.step},
    {"adam",
     {{"step", ckpt.adam.step},
      {"beta1", ckpt.adam.beta1},
      {"beta2", ckpt.adam.beta2},
      {"eps", ckpt.adam.eps},
      {"moments", moments}}},
    {"tensors", tensors}};
  detail::write_text_file(dir / kManifestName, manifest.dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path & dir)
{
  const auto path = dir / kManifestName;
  if (!std::filesystem::exists(path)) {
    throw FormatError("checkpoint: no " + std::string(kManifestName) + " in " + dir.string());
  }
  json j;
  try {
    j = json::parse(detail::read_text_file(path));
  } catch (const json::parse_error & e) {
    throw FormatError("checkpoint: " + path.string() + ": " + e.what());
  }
  const json & version = manifest_field(j, "version");
  if (!version.is_number_integer() || version.get<int>() != kCheckpointVersion) {
    throw FormatError(
      "checkpoint: version " + version.dump() + " is not supported (expected " +
      std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint c;
  c.version = kCheckpointVersion;
  c.model_config = model_config_from_json(manifest_field(j, "model"));
  c.train = train_config_from_json(manifest_field(j, "train"));
  c.step = manifest_field(j, "step").get<std::uint64_t>();

  const json & listed = manifest_field(j, "tensors");
  for (const auto & spec : parameter_specs(c.model_config)) {
    bool found = false;
    for (const auto & t : listed) {
      if (t.value("name", "") != spec.name) {
        continue;
      }
      found = true;
      const Shape stored = t.at("shape").get<Shape>();
      if (stored != spec.shape) {
        throw FormatError(
          "checkpoint: tensor '" + spec.name + "' has shape " + shape_string(stored) +
          " but the config requires " + shape_string(spec.shape));
      }
      if (t.value("dtype", "") != "float32") {
        throw FormatError("checkpoint: tensor '" + spec.name + "' is not float32");
      }
    }
    if (!found) {
      throw FormatError("checkpoint: missing tensor '" + spec.name + "' in manifest");
    }
    c.params.add(spec.name, read_tensor(dir, spec.name, spec.shape));
  }

  const json & adam = manifest_field(j, "adam");
  c.adam.step = adam.at("step").get<std::uint64_t>();
  c.adam.beta1 = adam.at("beta1").get<double>();
  c.adam.beta2 = adam.at("beta2").get<double>();
  c.adam.eps = adam.at("eps").get<double>();
  if (!adam.at("moments").empty()) {
    for (const auto & p : c.params) {
      c.adam.m.push_back(read_tensor(dir, "adam.m." + p.name, p.value.shape()));
      c.adam.v.push_back(read_tensor(dir, "adam.v." + p.name, p.value.shape()));
    }
  }
  return c;
}

std::uint64_t evaluation_seed(std::uint64_t seed, std::size_t index)
{
  return substream(seed, "eval", {index})();
}

EvaluationReport evaluate(
  const Model<float> & model, const std::vector<Scene> & scenes,
  const std::vector<std::string> & scene_ids, std::size_t k, std::uint64_t seed)
{
  if (scenes.empty()) {
    throw ConfigError("evaluate: dataset is empty");
  }
  if (scene_ids.size() != scenes.size()) {
    throw DimensionError("evaluate: scene id count does not match the scenes");
  }
  std::vector<MetricsReport> reports;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto samples = sample(model, scenes[i], k, evaluation_seed(seed, i));
    std::vector<SampleSet> sets;
    for (const auto & s : samples) {
      sets.push_back(to_sample_set(s));
    }
    reports.push_back(evaluate_scene(sets, scenes[i], scene_ids[i]));
  }
  return make_evaluation_report(std::move(reports));
}

}  // namespace trajformer
