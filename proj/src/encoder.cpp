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

#include "trajformer/encoder.hpp"

#include <cmath>
#include <random>

#include "trajformer/errors.hpp"
#include "trajformer/ops.hpp"

namespace trajformer
{

namespace
{

// Rows of p*p*C values, one per sub-patch, in (row block, col block) order.
template <typename T>
void append_subpatches(
  const Tensor<float> & patch, std::size_t p, std::vector<T> & out, std::size_t & rows)
{
  const std::size_t m = patch.dim(0);
  const std::size_t c = patch.dim(2);
  const std::size_t blocks = m / p;
  for (std::size_t bi = 0; bi < blocks; ++bi) {
    for (std::size_t bj = 0; bj < blocks; ++bj) {
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          for (std::size_t ch = 0; ch < c; ++ch) {
            out.push_back(static_cast<T>(patch[((bi * p + i) * m + bj * p + j) * c + ch]));
          }
        }
      }
      ++rows;
    }
  }
}

template <typename T>
void check_patch(const Tensor<float> & patch, const EncoderConfig & cfg)
{
  if (
    patch.rank() != 3 || patch.dim(0) != patch.dim(1) || patch.dim(2) != cfg.channels)
  {
    throw DimensionError(
      "embed_patches: expected an m x m x " + std::to_string(cfg.channels) + " patch, got " +
      shape_string(patch.shape()));
  }
  if (patch.dim(0) % cfg.subpatch != 0) {
    throw ConfigError(
      "embed_patches: sub-patch size " + std::to_string(cfg.subpatch) +
      " does not divide patch size " + std::to_string(patch.dim(0)));
  }
}

template <typename T>
Var<T> project_subpatches(const Bound<T> & w, std::vector<T> rows_data, std::size_t rows)
{
  const EncoderConfig & cfg = w.config().encoder;
  const EncoderSlots & s = w.layout().encoder;
  const std::size_t width = cfg.subpatch * cfg.subpatch * cfg.channels;
  Var<T> flat = w.tape->constant(Tensor<T>(Shape{rows, width}, std::move(rows_data)));
  return ops::linear(flat, w[s.patch_w], w[s.patch_b]);
}

template <typename T>
Var<T> dropout(Var<T> x, double rate, Rng * rng)
{
  if (rng == nullptr || rate <= 0.0) {
    return x;
  }
  std::bernoulli_distribution keep(1.0 - rate);
  Tensor<T> mask(x.shape());
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = keep(*rng) ? scale : T(0);
  }
  return ops::mul(x, x.tape->constant(std::move(mask)));
}

}  // namespace

template <typename T>
PoseEmbedding<T> embed_poses(const Bound<T> & w, const Tensor<T> & rel_past)
{
  if (rel_past.rank() != 2 || rel_past.cols() != 2) {
    throw DimensionError("embed_poses: expected n x 2 poses, got " + shape_string(rel_past.shape()));
  }
  const EncoderConfig & cfg = w.config().encoder;
  const EncoderSlots & s = w.layout().encoder;
  Tensor<T> scaled = rel_past;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scaled[i] *= static_cast<T>(cfg.position_scale);
  }
  Var<T> x = w.tape->constant(std::move(scaled));
  PoseEmbedding<T> out;
  out.projected = ops::linear(x, w[s.pose_w], w[s.pose_b]);
  out.tokens = ops::linear(out.projected, w[s.token_w], w[s.token_b]);
  return out;
}

template <typename T>
Var<T> embed_patches(const Bound<T> & w, const Tensor<float> & patch)
{
  const EncoderConfig & cfg = w.config().encoder;
  check_patch<T>(patch, cfg);
  std::vector<T> data;
  std::size_t rows = 0;
  append_subpatches(patch, cfg.subpatch, data, rows);
  return project_subpatches(w, std::move(data), rows);
}

template <typename T>
Tensor<T> pos_encode(const Pose & position, std::size_t time_index, const EncoderConfig & cfg)
{
  const std::size_t n = cfg.model_dim;
  const std::size_t half = n / 2;
  const std::size_t spatial_pairs = half / 2;
  const std::size_t freqs = (spatial_pairs + 2) / 3;
  const double quantities[3] = {std::hypot(position.x, position.y), position.x, position.y};
  Tensor<T> out(Shape{n});
  for (std::size_t j = 0; j < spatial_pairs; ++j) {
    const std::size_t f = j / 3;
    const double rate =
      freqs > 1 ? std::pow(0.01, static_cast<double>(f) / static_cast<double>(freqs - 1)) : 1.0;
    const double arg = quantities[j % 3] * rate;
    out[2 * j] = static_cast<T>(std::sin(arg));
    out[2 * j + 1] = static_cast<T>(std::cos(arg));
  }
  for (std::size_t j = 0; j < half / 2; ++j) {
    const double rate =
      std::pow(10000.0, -2.0 * static_cast<double>(j) / static_cast<double>(half));
    const double arg = static_cast<double>(time_index) * rate;
    out[half + 2 * j] = static_cast<T>(std::sin(arg));
    out[half + 2 * j + 1] = static_cast<T>(std::cos(arg));
  }
  return out;
}

template <typename T>
Var<T> fuse(Var<T> e_obs, Var<T> patch_term, Var<T> pos)
{
  if (e_obs.shape() != patch_term.shape() || e_obs.shape() != pos.shape()) {
    throw DimensionError(
      "fuse: width mismatch " + shape_string(e_obs.shape()) + ", " +
      shape_string(patch_term.shape()) + ", " + shape_string(pos.shape()));
  }
  return ops::mul(e_obs, ops::add(pos, patch_term));
}

template <typename T>
Var<T> encode(
  const Bound<T> & w, Var<T> tokens, std::size_t agents, const EncodeOptions & opts,
  AttentionProbe<T> * probe)
{
  const EncoderConfig & cfg = w.config().encoder;
  const EncoderSlots & s = w.layout().encoder;
  const std::size_t n = tokens.rows();
  if (n == 0 || agents == 0 || n % agents != 0) {
    throw DimensionError(
      "encode: " + std::to_string(n) + " tokens cannot be split across " +
      std::to_string(agents) + " agents");
  }
  if (tokens.shape().size() != 2 || tokens.cols() != cfg.model_dim) {
    throw DimensionError("encode: tokens must be n x model_dim, got " + shape_string(tokens.shape()));
  }
  const std::size_t steps = n / agents;
  const std::size_t dh = cfg.model_dim / cfg.heads;
  const T inv_sqrt_dh = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
  Var<T> x = tokens;
  for (const LayerSlots & l : s.layers) {
    Var<T> h = ops::layer_norm(x, w[l.ln1_gain], w[l.ln1_bias]);
    Var<T> q = ops::linear(h, w[l.wq], w[l.bq]);
    Var<T> k = ops::linear(h, w[l.wk], w[l.bk]);
    Var<T> v = ops::linear(h, w[l.wv], w[l.bv]);
    std::vector<Var<T>> heads;
    for (std::size_t hd = 0; hd < cfg.heads; ++hd) {
      Var<T> qh = ops::slice_cols(q, hd * dh, (hd + 1) * dh);
      Var<T> kh = ops::slice_cols(k, hd * dh, (hd + 1) * dh);
      Var<T> vh = ops::slice_cols(v, hd * dh, (hd + 1) * dh);
      Var<T> scores = ops::scale(ops::matmul(qh, ops::transpose(kh)), inv_sqrt_dh);
      Var<T> attn = ops::softmax(scores, 1);
      if (probe != nullptr) {
        probe->weights.push_back(attn.value());
      }
      heads.push_back(ops::matmul(attn, vh));
    }
    Var<T> merged = heads.size() == 1 ? heads[0] : ops::concat_cols(heads);
    Var<T> attn_out = ops::linear(merged, w[l.wo], w[l.bo]);
    x = ops::add(x, dropout(attn_out, cfg.dropout, opts.dropout_rng));
    Var<T> h2 = ops::layer_norm(x, w[l.ln2_gain], w[l.ln2_bias]);
    Var<T> mlp = ops::linear(ops::gelu(ops::linear(h2, w[l.mlp_w1], w[l.mlp_b1])), w[l.mlp_w2], w[l.mlp_b2]);
    x = ops::add(x, dropout(mlp, cfg.dropout, opts.dropout_rng));
  }
  x = ops::layer_norm(x, w[s.final_gain], w[s.final_bias]);
  std::vector<std::size_t> last(agents);
  for (std::size_t a = 0; a < agents; ++a) {
    last[a] = a * steps + steps - 1;
  }
  return ops::linear(ops::gather_rows(x, last), w[s.latent_w], w[s.latent_b]);
}

template <typename T>
Var<T> build_tokens(const Bound<T> & w, const Scene & scene)
{
  const EncoderConfig & cfg = w.config().encoder;
  const std::size_t agents = scene.tracks.size();
  const std::size_t t = cfg.past_len;
  if (agents == 0) {
    throw DimensionError("build_tokens: scene has no agents");
  }
  if (scene.raster.channels != cfg.channels) {
    throw DimensionError(
      "build_tokens: raster has " + std::to_string(scene.raster.channels) +
      " channels, encoder expects " + std::to_string(cfg.channels));
  }
  Tensor<T> rel(Shape{agents * t, 2});
  Tensor<T> pos(Shape{agents * t, cfg.model_dim});
  for (std::size_t a = 0; a < agents; ++a) {
    const Trajectory & past = scene.tracks[a].past;
    if (past.size() != t) {
      throw DimensionError(
        "build_tokens: track '" + scene.tracks[a].id + "' has " + std::to_string(past.size()) +
        " past poses, encoder expects " + std::to_string(t));
    }
    const Pose & anchor = past.back();
    for (std::size_t i = 0; i < t; ++i) {
      rel.at(a * t + i, 0) = static_cast<T>(past[i].x - anchor.x);
      rel.at(a * t + i, 1) = static_cast<T>(past[i].y - anchor.y);
      const Tensor<T> pe = pos_encode<T>(past[i], i, cfg);
      std::copy(pe.data().begin(), pe.data().end(), pos.data().begin() + (a * t + i) * cfg.model_dim);
    }
  }
  Var<T> e_obs = embed_poses(w, rel).tokens;

  // One crop per agent at its latest pose, or one per token.
  const std::size_t groups = cfg.per_timestep_patches ? agents * t : agents;
  std::vector<T> flat;
  std::size_t rows = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t a = cfg.per_timestep_patches ? g / t : g;
    const Pose & center =
      cfg.per_timestep_patches ? scene.tracks[a].past[g % t] : scene.tracks[a].past.back();
    append_subpatches(extract_patch(scene.raster, center, cfg.crop), cfg.subpatch, flat, rows);
  }
  Var<T> sub = project_subpatches(w, std::move(flat), rows);
  const std::size_t per_group = cfg.subpatches();
  Var<T> patch_term = sub;
  if (per_group > 1) {
    Tensor<T> pool(Shape{groups, rows});
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t r = 0; r < per_group; ++r) {
        pool.at(g, g * per_group + r) = T(1);
      }
    }
    patch_term = ops::matmul(w.tape->constant(std::move(pool)), sub);
  }
  if (!cfg.per_timestep_patches) {
    std::vector<std::size_t> spread(agents * t);
    for (std::size_t i = 0; i < spread.size(); ++i) {
      spread[i] = i / t;
    }
    patch_term = ops::gather_rows(patch_term, spread);
  }
  return fuse(e_obs, patch_term, w.tape->constant(std::move(pos)));
}

template <typename T>
Var<T> encode_scene(
  const Bound<T> & w, const Scene & scene, const EncodeOptions & opts, AttentionProbe<T> * probe)
{
  return encode(w, build_tokens(w, scene), scene.tracks.size(), opts, probe);
}

#define TRAJFORMER_INSTANTIATE_ENCODER(T)                                                     \
  template PoseEmbedding<T> embed_poses<T>(const Bound<T> &, const Tensor<T> &);              \
  template Var<T> embed_patches<T>(const Bound<T> &, const Tensor<float> &);                  \
  template Tensor<T> pos_encode<T>(const Pose &, std::size_t, const EncoderConfig &);         \
  template Var<T> fuse<T>(Var<T>, Var<T>, Var<T>);                                            \
  template Var<T> encode<T>(                                                                  \
    const Bound<T> &, Var<T>, std::size_t, const EncodeOptions &, AttentionProbe<T> *);       \
  template Var<T> build_tokens<T>(const Bound<T> &, const Scene &);                           \
  template Var<T> encode_scene<T>(                                                            \
    const Bound<T> &, const Scene &, const EncodeOptions &, AttentionProbe<T> *);

TRAJFORMER_INSTANTIATE_ENCODER(float)
TRAJFORMER_INSTANTIATE_ENCODER(double)

#undef TRAJFORMER_INSTANTIATE_ENCODER

}  // namespace trajformer
