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

#include "trajformer/objective.hpp"

#include <random>

#include "trajformer/encoder.hpp"
#include "trajformer/errors.hpp"
#include "trajformer/flow.hpp"
#include "trajformer/ops.hpp"
#include "trajformer/rng.hpp"

namespace trajformer
{

void ObjectiveConfig::validate() const
{
  if (!(alpha >= 0.0)) {
    throw ConfigError("objective: alpha must be >= 0");
  }
  if (k_mc == 0) {
    throw ConfigError("objective: k_mc must be >= 1");
  }
}

template <typename T>
Var<T> prior_log_prob(Var<T> positions, const PriorGrid & prior)
{
  const Tensor<T> & p = positions.value();
  if (p.rank() != 2 || p.cols() != 2) {
    throw DimensionError("prior_log_prob: expected B x 2 positions, got " + shape_string(p.shape()));
  }
  const std::size_t n = p.rows();
  Tensor<T> y(Shape{n, 1});
  std::vector<T> dx(n);
  std::vector<T> dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PriorSample s = prior_sample(prior, Pose{double(p.at(i, 0)), double(p.at(i, 1))});
    y[i] = static_cast<T>(s.log_prob);
    dx[i] = static_cast<T>(s.d_dx);
    dy[i] = static_cast<T>(s.d_dy);
  }
  const std::size_t pid = positions.id;
  return positions.tape->push(
    std::move(y), {positions},
    [pid, dx = std::move(dx), dy = std::move(dy)](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      Tensor<T> & gp = t.grad_mut(pid);
      for (std::size_t i = 0; i < dx.size(); ++i) {
        gp[2 * i] += g[i] * dx[i];
        gp[2 * i + 1] += g[i] * dy[i];
      }
    },
    "prior_log_prob");
}

Tensor<double> mc_noise(
  std::uint64_t seed, std::size_t scene_index, std::size_t agents, std::size_t k_mc,
  std::size_t steps)
{
  Tensor<double> z(Shape{agents * k_mc, 2 * steps});
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t a = 0; a < agents; ++a) {
    for (std::size_t j = 0; j < k_mc; ++j) {
      Rng rng = substream(seed, "mc", {scene_index, a, j});
      for (std::size_t c = 0; c < 2 * steps; ++c) {
        z.at(a * k_mc + j, c) = normal(rng);
      }
    }
  }
  return z;
}

template <typename T>
SceneTerms<T> scene_terms(
  const Bound<T> & w, const Scene & scene, std::size_t k_mc, const Tensor<T> & noise)
{
  if (k_mc == 0) {
    throw ConfigError("objective: k_mc must be >= 1");
  }
  const std::size_t agents = scene.tracks.size();
  std::vector<Trajectory> past;
  std::vector<Trajectory> future;
  for (const auto & tr : scene.tracks) {
    past.push_back(tr.past);
    future.push_back(tr.future);
  }
  Var<T> codes = encode_scene(w, scene);

  SceneTerms<T> out;
  out.agents = agents;
  TeacherForced<T> tf = teacher_forced(make_flow_context(w, codes, past), future);
  out.nll_sum = ops::scale(ops::sum(tf.log_prob), T(-1));

  std::vector<std::size_t> rows(agents * k_mc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = i / k_mc;
  }
  Rollout<T> r = rollout(make_flow_context(w, codes, past, rows), noise);
  Var<T> acc = ops::sum(prior_log_prob(r.positions[0], scene.prior));
  for (std::size_t t = 1; t < r.positions.size(); ++t) {
    acc = ops::add(acc, ops::sum(prior_log_prob(r.positions[t], scene.prior)));
  }
  const double per_agent = static_cast<double>(k_mc * r.positions.size());
  out.prior_sum = ops::scale(acc, static_cast<T>(-1.0 / per_agent));
  return out;
}

template <typename T>
LossBreakdown total_loss(
  const Model<T> & model, const std::vector<const Scene *> & batch, const ObjectiveConfig & cfg,
  std::uint64_t seed, ParameterSet<T> * grads)
{
  cfg.validate();
  if (batch.empty()) {
    throw ConfigError("objective: empty batch");
  }
  std::size_t total_agents = 0;
  for (const Scene * s : batch) {
    total_agents += s->tracks.size();
  }
  const std::size_t steps = model.config().flow.future_len;
  const double inv_n = 1.0 / static_cast<double>(total_agents);
  LossBreakdown out;
  out.alpha = cfg.alpha;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Scene & scene = *batch[i];
    Tape<T> tape;
    Bound<T> w = bind(tape, model, grads != nullptr);
    const Tensor<T> noise =
      mc_noise(seed, i, scene.tracks.size(), cfg.k_mc, steps).template cast<T>();
    SceneTerms<T> terms = scene_terms(w, scene, cfg.k_mc, noise);
    out.nll_term += static_cast<double>(terms.nll_sum.value()[0]) * inv_n;
    out.prior_term += static_cast<double>(terms.prior_sum.value()[0]) * inv_n;
    if (grads != nullptr) {
      Var<T> loss = ops::scale(
        ops::add(terms.nll_sum, ops::scale(terms.prior_sum, static_cast<T>(cfg.alpha))),
        static_cast<T>(inv_n));
      tape.backward(loss);
      accumulate_grads(w, *grads);
    }
  }
  out.total = out.nll_term + cfg.alpha * out.prior_term;
  return out;
}

template <typename T>
double nll_term(const Model<T> & model, const std::vector<const Scene *> & batch)
{
  if (batch.empty()) {
    throw ConfigError("objective: empty batch");
  }
  double sum = 0.0;
  std::size_t agents = 0;
  for (const Scene * s : batch) {
    for (double lp : ground_truth_log_prob(model, *s)) {
      sum -= lp;
    }
    agents += s->tracks.size();
  }
  return sum / static_cast<double>(agents);
}

template <typename T>
double prior_term(
  const Model<T> & model, const std::vector<const Scene *> & batch, std::size_t k_mc,
  std::uint64_t seed)
{
  ObjectiveConfig cfg;
  cfg.alpha = 0.0;
  cfg.k_mc = k_mc;
  return total_loss(model, batch, cfg, seed).prior_term;
}

#define TRAJFORMER_INSTANTIATE_OBJECTIVE(T)                                                  \
  template Var<T> prior_log_prob<T>(Var<T>, const PriorGrid &);                              \
  template SceneTerms<T> scene_terms<T>(                                                     \
    const Bound<T> &, const Scene &, std::size_t, const Tensor<T> &);                        \
  template LossBreakdown total_loss<T>(                                                      \
    const Model<T> &, const std::vector<const Scene *> &, const ObjectiveConfig &,           \
    std::uint64_t, ParameterSet<T> *);                                                       \
  template double nll_term<T>(const Model<T> &, const std::vector<const Scene *> &);         \
  template double prior_term<T>(                                                             \
    const Model<T> &, const std::vector<const Scene *> &, std::size_t, std::uint64_t);

TRAJFORMER_INSTANTIATE_OBJECTIVE(float)
TRAJFORMER_INSTANTIATE_OBJECTIVE(double)

#undef TRAJFORMER_INSTANTIATE_OBJECTIVE

}  // namespace trajformer
