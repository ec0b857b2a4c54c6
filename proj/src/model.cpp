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

#include "trajformer/model.hpp"

#include <cmath>
#include <random>

#include "trajformer/errors.hpp"
#include "trajformer/rng.hpp"

namespace trajformer
{

namespace
{

class SpecBuilder
{
public:
  std::size_t weight(std::string name, std::size_t in, std::size_t out, std::size_t fan_in = 0)
  {
    return push(std::move(name), Shape{in, out}, Init::kUniform, fan_in == 0 ? in : fan_in);
  }
  std::size_t bias(std::string name, std::size_t n)
  {
    return push(std::move(name), Shape{n}, Init::kZeros, 1);
  }
  std::size_t gain(std::string name, std::size_t n)
  {
    return push(std::move(name), Shape{n}, Init::kOnes, 1);
  }

  std::vector<ParamSpec> specs;

private:
  std::size_t push(std::string name, Shape shape, Init init, std::size_t fan_in)
  {
    specs.push_back(ParamSpec{std::move(name), std::move(shape), init, fan_in});
    return specs.size() - 1;
  }
};

ParamLayout build(const ModelConfig & cfg, SpecBuilder & b)
{
  cfg.validate();
  const EncoderConfig & e = cfg.encoder;
  const FlowConfig & f = cfg.flow;
  const std::size_t w = e.model_dim;
  ParamLayout layout;
  EncoderSlots & es = layout.encoder;
  es.pose_w = b.weight("encoder.pose.weight", 2, e.pose_width);
  es.pose_b = b.bias("encoder.pose.bias", e.pose_width);
  es.token_w = b.weight("encoder.token.weight", e.pose_width, w);
  es.token_b = b.bias("encoder.token.bias", w);
  const std::size_t patch_in = e.subpatch * e.subpatch * e.channels;
  es.patch_w = b.weight("encoder.patch.weight", patch_in, w);
  es.patch_b = b.bias("encoder.patch.bias", w);
  for (std::size_t l = 0; l < e.layers; ++l) {
    const std::string p = "encoder.layers." + std::to_string(l) + ".";
    LayerSlots s{};
    s.ln1_gain = b.gain(p + "ln1.gain", w);
    s.ln1_bias = b.bias(p + "ln1.bias", w);
    s.wq = b.weight(p + "attn.query.weight", w, w);
    s.bq = b.bias(p + "attn.query.bias", w);
    s.wk = b.weight(p + "attn.key.weight", w, w);
    s.bk = b.bias(p + "attn.key.bias", w);
    s.wv = b.weight(p + "attn.value.weight", w, w);
    s.bv = b.bias(p + "attn.value.bias", w);
    s.wo = b.weight(p + "attn.out.weight", w, w);
    s.bo = b.bias(p + "attn.out.bias", w);
    s.ln2_gain = b.gain(p + "ln2.gain", w);
    s.ln2_bias = b.bias(p + "ln2.bias", w);
    s.mlp_w1 = b.weight(p + "mlp.fc1.weight", w, w * e.mlp_ratio);
    s.mlp_b1 = b.bias(p + "mlp.fc1.bias", w * e.mlp_ratio);
    s.mlp_w2 = b.weight(p + "mlp.fc2.weight", w * e.mlp_ratio, w);
    s.mlp_b2 = b.bias(p + "mlp.fc2.bias", w);
    es.layers.push_back(s);
  }
  es.final_gain = b.gain("encoder.final_norm.gain", w);
  es.final_bias = b.bias("encoder.final_norm.bias", w);
  es.latent_w = b.weight("encoder.latent.weight", w, e.latent_dim);
  es.latent_b = b.bias("encoder.latent.bias", e.latent_dim);

  FlowSlots & fs = layout.flow;
  const std::size_t h = f.hidden;
  const std::size_t fan = e.latent_dim + kFlowStateInputs + h;
  fs.gru_code = b.weight("flow.gru.code.weight", e.latent_dim, 3 * h, fan);
  fs.gru_state = b.weight("flow.gru.state.weight", kFlowStateInputs, 3 * h, fan);
  fs.gru_hidden = b.weight("flow.gru.hidden.weight", h, 3 * h, fan);
  fs.gru_bias_in = b.bias("flow.gru.input.bias", 3 * h);
  fs.gru_bias_hidden = b.bias("flow.gru.hidden.bias", 3 * h);
  fs.head_code = b.weight("flow.head.code.weight", e.latent_dim, f.head_hidden, fan);
  fs.head_state = b.weight("flow.head.state.weight", kFlowStateInputs, f.head_hidden, fan);
  fs.head_hidden = b.weight("flow.head.hidden.weight", h, f.head_hidden, fan);
  fs.head_bias = b.bias("flow.head.bias", f.head_hidden);
  fs.out_w = b.weight("flow.out.weight", f.head_hidden, kFlowRawOutputs);
  fs.out_b = b.bias("flow.out.bias", kFlowRawOutputs);
  return layout;
}

}  // namespace

std::vector<ParamSpec> parameter_specs(const ModelConfig & cfg)
{
  SpecBuilder b;
  build(cfg, b);
  return b.specs;
}

ParamLayout make_layout(const ModelConfig & cfg)
{
  SpecBuilder b;
  return build(cfg, b);
}

std::size_t count_parameters(const ModelConfig & cfg)
{
  std::size_t n = 0;
  for (const auto & s : parameter_specs(cfg)) {
    n += shape_size(s.shape);
  }
  return n;
}

template <typename T>
Model<T>::Model(ModelConfig cfg, ParameterSet<T> params)
: config_(std::move(cfg)), layout_(make_layout(config_)), params_(std::move(params))
{
  const auto specs = parameter_specs(config_);
  if (specs.size() != params_.size()) {
    throw FormatError(
      "model '" + config_.name + "' expects " + std::to_string(specs.size()) +
      " tensors, got " + std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (params_[i].name != specs[i].name) {
      throw FormatError(
        "tensor " + std::to_string(i) + " is '" + params_[i].name + "', expected '" +
        specs[i].name + "'");
    }
    if (params_[i].value.shape() != specs[i].shape) {
      throw FormatError(
        "tensor '" + specs[i].name + "' has shape " + shape_string(params_[i].value.shape()) +
        ", config requires " + shape_string(specs[i].shape));
    }
  }
}

template <typename T>
Model<T> Model<T>::initialized(const ModelConfig & cfg, std::uint64_t seed)
{
  ParameterSet<T> params;
  Rng rng = substream(seed, "init");
  for (const auto & s : parameter_specs(cfg)) {
    Tensor<T> v(s.shape);
    switch (s.init) {
      case Init::kZeros:
        break;
      case Init::kOnes:
        v.fill(T(1));
        break;
      case Init::kUniform: {
        const double bound = 1.0 / std::sqrt(static_cast<double>(s.fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < v.size(); ++i) {
          v[i] = static_cast<T>(dist(rng));
        }
        break;
      }
    }
    params.add(s.name, std::move(v));
  }
  return Model<T>(cfg, std::move(params));
}

template <typename T>
Bound<T> bind(Tape<T> & tape, const Model<T> & model, bool requires_grad)
{
  Bound<T> b;
  b.model = &model;
  b.tape = &tape;
  b.vars.reserve(model.params().size());
  for (const auto & p : model.params()) {
    b.vars.push_back(tape.leaf(p.value, requires_grad));
  }
  return b;
}

template <typename T>
void accumulate_grads(const Bound<T> & bound, ParameterSet<T> & grads)
{
  for (std::size_t i = 0; i < bound.vars.size(); ++i) {
    const Tensor<T> & g = bound.tape->grad(bound.vars[i]);
    if (g.empty()) {
      continue;
    }
    Tensor<T> & dst = grads[i].grad;
    if (dst.shape() != g.shape()) {
      throw DimensionError("accumulate_grads: gradient shape drift for " + grads[i].name);
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
      dst[j] += g[j];
    }
  }
}

template class Model<float>;
template class Model<double>;
template Bound<float> bind<float>(Tape<float> &, const Model<float> &, bool);
template Bound<double> bind<double>(Tape<double> &, const Model<double> &, bool);
template void accumulate_grads<float>(const Bound<float> &, ParameterSet<float> &);
template void accumulate_grads<double>(const Bound<double> &, ParameterSet<double> &);

}  // namespace trajformer
