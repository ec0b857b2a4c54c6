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

#include "trajformer/flow.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "trajformer/encoder.hpp"
#include "trajformer/errors.hpp"
#include "trajformer/ops.hpp"
#include "trajformer/rng.hpp"

namespace trajformer
{

namespace
{

template <typename T>
Tensor<T> pose_rows(const std::vector<Pose> & poses)
{
  Tensor<T> out(Shape{poses.size(), 2});
  for (std::size_t i = 0; i < poses.size(); ++i) {
    out.at(i, 0) = static_cast<T>(poses[i].x);
    out.at(i, 1) = static_cast<T>(poses[i].y);
  }
  return out;
}

template <typename T>
Tensor<T> noise_columns(const Tensor<T> & z, std::size_t step)
{
  Tensor<T> out(Shape{z.rows(), 2});
  for (std::size_t b = 0; b < z.rows(); ++b) {
    out.at(b, 0) = z.at(b, 2 * step);
    out.at(b, 1) = z.at(b, 2 * step + 1);
  }
  return out;
}

template <typename T>
Var<T> row_sum(Var<T> a)
{
  return ops::matmul(a, a.tape->constant(Tensor<T>(Shape{a.cols(), 1}, T(1))));
}

}  // namespace

template <typename T>
FlowContext<T> make_flow_context(
  const Bound<T> & w, Var<T> codes, const std::vector<Trajectory> & past,
  std::vector<std::size_t> rows)
{
  const std::size_t agents = codes.rows();
  if (codes.shape().size() != 2 || codes.cols() != w.config().encoder.latent_dim) {
    throw DimensionError(
      "flow: codes must be A x " + std::to_string(w.config().encoder.latent_dim) + ", got " +
      shape_string(codes.shape()));
  }
  if (past.size() != agents) {
    throw DimensionError(
      "flow: " + std::to_string(past.size()) + " past tracks for " + std::to_string(agents) +
      " codes");
  }
  if (rows.empty()) {
    rows.resize(agents);
    for (std::size_t a = 0; a < agents; ++a) {
      rows[a] = a;
    }
  }
  std::vector<Pose> anchor;
  std::vector<Pose> prev2;
  for (std::size_t r : rows) {
    if (r >= agents) {
      throw DimensionError("flow: batch row refers to agent " + std::to_string(r));
    }
    if (past[r].size() < 2) {
      throw DimensionError("flow: need two observed poses per agent");
    }
    anchor.push_back(past[r].back());
    prev2.push_back(past[r][past[r].size() - 2]);
  }
  const FlowSlots & s = w.layout().flow;
  FlowContext<T> ctx;
  ctx.bound = &w;
  ctx.code_gru = ops::gather_rows(ops::matmul(codes, w[s.gru_code]), rows);
  ctx.code_head = ops::gather_rows(ops::matmul(codes, w[s.head_code]), rows);
  ctx.anchor = pose_rows<T>(anchor);
  ctx.prev2 = pose_rows<T>(prev2);
  return ctx;
}

template <typename T>
Var<T> initial_hidden(const FlowContext<T> & ctx)
{
  return ctx.bound->tape->constant(
    Tensor<T>(Shape{ctx.batch(), ctx.bound->config().flow.hidden}));
}

template <typename T>
FlowStep<T> decode_step(const FlowContext<T> & ctx, Var<T> s_prev, Var<T> s_prev2, Var<T> hidden)
{
  const Bound<T> & w = *ctx.bound;
  const FlowSlots & s = w.layout().flow;
  const FlowConfig & f = w.config().flow;
  const std::size_t h = f.hidden;
  const T scale = static_cast<T>(w.config().encoder.position_scale);
  Var<T> anchor = w.tape->constant(ctx.anchor);
  Var<T> state = ops::concat_cols<T>(
    {ops::scale(ops::sub(s_prev, anchor), scale), ops::scale(ops::sub(s_prev, s_prev2), scale)});

  Var<T> gi = ops::add(ops::add(ctx.code_gru, ops::matmul(state, w[s.gru_state])), w[s.gru_bias_in]);
  Var<T> gh = ops::linear(hidden, w[s.gru_hidden], w[s.gru_bias_hidden]);
  Var<T> reset = ops::sigmoid(ops::add(ops::slice_cols(gi, 0, h), ops::slice_cols(gh, 0, h)));
  Var<T> update =
    ops::sigmoid(ops::add(ops::slice_cols(gi, h, 2 * h), ops::slice_cols(gh, h, 2 * h)));
  Var<T> cand = ops::tanh(
    ops::add(ops::slice_cols(gi, 2 * h, 3 * h), ops::mul(reset, ops::slice_cols(gh, 2 * h, 3 * h))));
  Var<T> keep = ops::add_scalar(ops::scale(update, T(-1)), T(1));
  Var<T> next = ops::add(ops::mul(keep, cand), ops::mul(update, hidden));

  Var<T> head = ops::tanh(ops::add(
    ops::add(
      ops::add(ctx.code_head, ops::matmul(state, w[s.head_state])),
      ops::matmul(next, w[s.head_hidden])),
    w[s.head_bias]));
  Var<T> raw = ops::linear(head, w[s.out_w], w[s.out_b]);

  const T floor = static_cast<T>(f.sigma_floor);
  FlowStep<T> out;
  out.mu = ops::add(ops::sub(ops::scale(s_prev, T(2)), s_prev2), ops::slice_cols(raw, 0, 2));
  out.l00 = ops::add_scalar(ops::softplus(ops::slice_cols(raw, 2, 3)), floor);
  out.l10 = ops::slice_cols(raw, 3, 4);
  out.l11 = ops::add_scalar(ops::softplus(ops::slice_cols(raw, 4, 5)), floor);
  out.hidden = next;
  return out;
}

template <typename T>
Var<T> flow_forward(const FlowStep<T> & step, Var<T> z)
{
  Var<T> z0 = ops::slice_cols(z, 0, 1);
  Var<T> z1 = ops::slice_cols(z, 1, 2);
  Var<T> sx = ops::add(ops::slice_cols(step.mu, 0, 1), ops::mul(step.l00, z0));
  Var<T> sy = ops::add(
    ops::add(ops::slice_cols(step.mu, 1, 2), ops::mul(step.l10, z0)), ops::mul(step.l11, z1));
  return ops::concat_cols<T>({sx, sy});
}

template <typename T>
Var<T> flow_inverse(const FlowStep<T> & step, Var<T> s)
{
  Var<T> dx = ops::sub(ops::slice_cols(s, 0, 1), ops::slice_cols(step.mu, 0, 1));
  Var<T> dy = ops::sub(ops::slice_cols(s, 1, 2), ops::slice_cols(step.mu, 1, 2));
  Var<T> z0 = ops::div(dx, step.l00);
  Var<T> z1 = ops::div(ops::sub(dy, ops::mul(step.l10, z0)), step.l11);
  return ops::concat_cols<T>({z0, z1});
}

template <typename T>
Var<T> step_log_density(const FlowStep<T> & step, Var<T> z)
{
  const T log_2pi = static_cast<T>(std::log(2.0 * std::numbers::pi));
  Var<T> base = ops::add_scalar(ops::scale(row_sum(ops::square(z)), T(-0.5)), -log_2pi);
  return ops::sub(ops::sub(base, ops::log(step.l00)), ops::log(step.l11));
}

template <typename T>
TeacherForced<T> teacher_forced(const FlowContext<T> & ctx, const std::vector<Trajectory> & futures)
{
  const std::size_t batch = ctx.batch();
  if (futures.size() != batch) {
    throw DimensionError(
      "teacher_forced: " + std::to_string(futures.size()) + " futures for " +
      std::to_string(batch) + " rows");
  }
  const std::size_t steps = futures.empty() ? 0 : futures[0].size();
  if (steps == 0) {
    throw DimensionError("teacher_forced: empty future");
  }
  for (const auto & f : futures) {
    if (f.size() != steps) {
      throw DimensionError("teacher_forced: futures differ in length");
    }
  }
  Tape<T> & tape = *ctx.bound->tape;
  Var<T> s_prev = tape.constant(ctx.anchor);
  Var<T> s_prev2 = tape.constant(ctx.prev2);
  Var<T> hidden = initial_hidden(ctx);
  TeacherForced<T> out;
  out.z = Tensor<T>(Shape{batch, 2 * steps});
  std::vector<Pose> gt(batch);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      gt[b] = futures[b][t];
    }
    Var<T> target = tape.constant(pose_rows<T>(gt));
    FlowStep<T> step = decode_step(ctx, s_prev, s_prev2, hidden);
    Var<T> z = flow_inverse(step, target);
    Var<T> lp = step_log_density(step, z);
    out.log_prob = t == 0 ? lp : ops::add(out.log_prob, lp);
    for (std::size_t b = 0; b < batch; ++b) {
      out.z.at(b, 2 * t) = z.value().at(b, 0);
      out.z.at(b, 2 * t + 1) = z.value().at(b, 1);
    }
    s_prev2 = s_prev;
    s_prev = target;
    hidden = step.hidden;
  }
  return out;
}

template <typename T>
Rollout<T> rollout(const FlowContext<T> & ctx, const Tensor<T> & z)
{
  const std::size_t batch = ctx.batch();
  if (z.rank() != 2 || z.rows() != batch || z.cols() % 2 != 0 || z.cols() == 0) {
    throw DimensionError(
      "rollout: noise must be " + std::to_string(batch) + " x 2T, got " + shape_string(z.shape()));
  }
  const std::size_t steps = z.cols() / 2;
  Tape<T> & tape = *ctx.bound->tape;
  Var<T> s_prev = tape.constant(ctx.anchor);
  Var<T> s_prev2 = tape.constant(ctx.prev2);
  Var<T> hidden = initial_hidden(ctx);
  Rollout<T> out;
  for (std::size_t t = 0; t < steps; ++t) {
    FlowStep<T> step = decode_step(ctx, s_prev, s_prev2, hidden);
    Var<T> zt = tape.constant(noise_columns(z, t));
    Var<T> s = flow_forward(step, zt);
    Var<T> lp = step_log_density(step, zt);
    out.log_prob = t == 0 ? lp : ops::add(out.log_prob, lp);
    out.positions.push_back(s);
    s_prev2 = s_prev;
    s_prev = s;
    hidden = step.hidden;
  }
  return out;
}

Tensor<double> draw_noise(std::uint64_t seed, std::size_t agents, std::size_t k, std::size_t steps)
{
  Tensor<double> z(Shape{agents * k, 2 * steps});
  for (std::size_t a = 0; a < agents; ++a) {
    for (std::size_t j = 0; j < k; ++j) {
      Rng rng = substream(seed, "z", {a, j});
      std::normal_distribution<double> normal(0.0, 1.0);
      for (std::size_t c = 0; c < 2 * steps; ++c) {
        z.at(a * k + j, c) = normal(rng);
      }
    }
  }
  return z;
}

template <typename T>
std::vector<TrajectorySamples> sample_with_noise(
  const Model<T> & model, const Scene & scene, std::size_t k, const Tensor<double> & z)
{
  if (k == 0) {
    throw ConfigError("sample: k must be >= 1");
  }
  const std::size_t agents = scene.tracks.size();
  const std::size_t steps = model.config().flow.future_len;
  if (z.rank() != 2 || z.rows() != agents * k || z.cols() != 2 * steps) {
    throw DimensionError(
      "sample: noise must be " + std::to_string(agents * k) + " x " + std::to_string(2 * steps) +
      ", got " + shape_string(z.shape()));
  }
  Tape<T> tape;
  Bound<T> w = bind(tape, model, false);
  Var<T> codes = encode_scene(w, scene);
  std::vector<Trajectory> past;
  for (const auto & tr : scene.tracks) {
    past.push_back(tr.past);
  }
  std::vector<std::size_t> rows(agents * k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = i / k;
  }
  FlowContext<T> ctx = make_flow_context(w, codes, past, rows);
  Rollout<T> r = rollout(ctx, z.cast<T>());

  std::vector<TrajectorySamples> out(agents);
  for (std::size_t a = 0; a < agents; ++a) {
    TrajectorySamples & s = out[a];
    s.positions = Tensor<double>(Shape{k, steps, 2});
    s.z = Tensor<double>(Shape{k, steps, 2});
    s.log_probs.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t b = a * k + j;
      for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t c = 0; c < 2; ++c) {
          s.positions[(j * steps + t) * 2 + c] = static_cast<double>(r.positions[t].value().at(b, c));
          s.z[(j * steps + t) * 2 + c] = z.at(b, 2 * t + c);
        }
      }
      s.log_probs[j] = static_cast<double>(r.log_prob.value()[b]);
    }
  }
  return out;
}

template <typename T>
std::vector<TrajectorySamples> sample(
  const Model<T> & model, const Scene & scene, std::size_t k, std::uint64_t seed)
{
  return sample_with_noise(
    model, scene, k, draw_noise(seed, scene.tracks.size(), k, model.config().flow.future_len));
}

template <typename T>
std::vector<double> ground_truth_log_prob(const Model<T> & model, const Scene & scene)
{
  Tape<T> tape;
  Bound<T> w = bind(tape, model, false);
  Var<T> codes = encode_scene(w, scene);
  std::vector<Trajectory> past;
  std::vector<Trajectory> future;
  for (const auto & tr : scene.tracks) {
    past.push_back(tr.past);
    future.push_back(tr.future);
  }
  TeacherForced<T> tf = teacher_forced(make_flow_context(w, codes, past), future);
  std::vector<double> out(scene.tracks.size());
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = static_cast<double>(tf.log_prob.value()[a]);
  }
  return out;
}

#define TRAJFORMER_INSTANTIATE_FLOW(T)                                                          \
  template FlowContext<T> make_flow_context<T>(                                                 \
    const Bound<T> &, Var<T>, const std::vector<Trajectory> &, std::vector<std::size_t>);       \
  template Var<T> initial_hidden<T>(const FlowContext<T> &);                                    \
  template FlowStep<T> decode_step<T>(const FlowContext<T> &, Var<T>, Var<T>, Var<T>);          \
  template Var<T> flow_forward<T>(const FlowStep<T> &, Var<T>);                                 \
  template Var<T> flow_inverse<T>(const FlowStep<T> &, Var<T>);                                 \
  template Var<T> step_log_density<T>(const FlowStep<T> &, Var<T>);                             \
  template TeacherForced<T> teacher_forced<T>(                                                  \
    const FlowContext<T> &, const std::vector<Trajectory> &);                                   \
  template Rollout<T> rollout<T>(const FlowContext<T> &, const Tensor<T> &);                    \
  template std::vector<TrajectorySamples> sample_with_noise<T>(                                 \
    const Model<T> &, const Scene &, std::size_t, const Tensor<double> &);                      \
  template std::vector<TrajectorySamples> sample<T>(                                            \
    const Model<T> &, const Scene &, std::size_t, std::uint64_t);                               \
  template std::vector<double> ground_truth_log_prob<T>(const Model<T> &, const Scene &);

TRAJFORMER_INSTANTIATE_FLOW(float)
TRAJFORMER_INSTANTIATE_FLOW(double)

#undef TRAJFORMER_INSTANTIATE_FLOW

}  // namespace trajformer
