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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "trajformer/encoder.hpp"
#include "trajformer/errors.hpp"
#include "trajformer/ops.hpp"

namespace trajformer
{
namespace
{

using testing::random_scene;
using testing::random_tensor;
using testing::tiny_config;

TEST(EmbedPoses, DefaultProjectionWidth)
{
  const ModelConfig cfg = model_config("tf12-ref");
  auto model = Model<double>::initialized(cfg, 1);
  Tape<double> tape;
  auto w = bind(tape, model, false);
  Rng rng(1);
  auto e = embed_poses(w, random_tensor(rng, {6, 2}));
  EXPECT_EQ(e.projected.shape(), (Shape{6, 1024}));
  EXPECT_EQ(e.tokens.shape(), (Shape{6, cfg.encoder.model_dim}));
}

TEST(EmbedPoses, ZeroInputZeroBiasGivesZero)
{
  auto model = Model<double>::initialized(tiny_config(), 1);
  Tape<double> tape;
  auto w = bind(tape, model, false);
  auto e = embed_poses(w, Tensor<double>(Shape{6, 2}));
  for (double v : e.projected.value().values()) {
    EXPECT_EQ(v, 0.0);
  }
  for (double v : e.tokens.value().values()) {
    EXPECT_EQ(v, 0.0);
  }
  EXPECT_THROW(embed_poses(w, Tensor<double>(Shape{6, 3})), DimensionError);
}

TEST(EmbedPoses, GradientMatchesFiniteDifferences)
{
  auto model = Model<double>::initialized(tiny_config(), 2);
  Rng rng(3);
  auto rel = random_tensor(rng, {6, 2}, -5, 5);
  auto r = random_tensor(rng, {6, 8});
  const double err = testing::model_gradcheck(
    model,
    [&](const Bound<double> & w) {
      return ops::sum(ops::mul(embed_poses(w, rel).tokens, w.tape->constant(r)));
    },
    rng, 8);
  EXPECT_LE(err, 1e-4);
}

TEST(EmbedPatches, DefaultCropIsOneToken)
{
  auto model = Model<double>::initialized(model_config("tf12-ref"), 1);
  Tape<double> tape;
  auto w = bind(tape, model, false);
  auto e = embed_patches(w, Tensor<float>(Shape{16, 16, 3}, 0.5f));
  EXPECT_EQ(e.shape(), (Shape{1, model.config().encoder.model_dim}));
}

TEST(EmbedPatches, LargerCropSplitsIntoFourSubpatches)
{
  ModelConfig cfg = model_config("tf12-ref");
  cfg.encoder.crop = 32;
  auto model = Model<double>::initialized(cfg, 1);
  EXPECT_EQ(model.params().at("encoder.patch.weight").value.shape(), (Shape{16 * 16 * 3, 16}));
  Tape<double> tape;
  auto w = bind(tape, model, false);
  auto e = embed_patches(w, Tensor<float>(Shape{32, 32, 3}));
  EXPECT_EQ(e.shape(), (Shape{4, 16}));
  for (double v : e.value().values()) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(EmbedPatches, SubpatchOrderingMatchesManualFlatten)
{
  ModelConfig cfg = tiny_config();
  auto model = Model<double>::initialized(cfg, 4);
  Tape<double> tape;
  auto w = bind(tape, model, false);
  Tensor<float> patch(Shape{4, 4, 3});
  for (std::size_t i = 0; i < patch.size(); ++i) {
    patch[i] = static_cast<float>(i) * 0.01f;
  }
  auto e = embed_patches(w, patch).value();
  const auto & wt = model.params().at("encoder.patch.weight").value;
  ASSERT_EQ(e.shape(), (Shape{4, 8}));
  for (std::size_t bi = 0; bi < 2; ++bi) {
    for (std::size_t bj = 0; bj < 2; ++bj) {
      for (std::size_t o = 0; o < 8; ++o) {
        double acc = 0.0;
        std::size_t f = 0;
        for (std::size_t i = 0; i < 2; ++i) {
          for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t c = 0; c < 3; ++c) {
              acc += patch[((bi * 2 + i) * 4 + bj * 2 + j) * 3 + c] * wt.at(f++, o);
            }
          }
        }
        EXPECT_NEAR(e.at(bi * 2 + bj, o), acc, 1e-9);
      }
    }
  }
}

TEST(EmbedPatches, NonDividingSubpatchIsConfigError)
{
  auto model = Model<double>::initialized(tiny_config(), 1);
  Tape<double> tape;
  auto w = bind(tape, model, false);
  EXPECT_THROW(embed_patches(w, Tensor<float>(Shape{5, 5, 3})), ConfigError);
  EXPECT_THROW(embed_patches(w, Tensor<float>(Shape{4, 4, 2})), DimensionError);
  ModelConfig bad = tiny_config();
  bad.encoder.subpatch = 3;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(PosEncode, ZeroArgumentAlternatesSinCos)
{
  const EncoderConfig cfg = model_config("tf12-ref").encoder;
  auto pe = pos_encode<double>(Pose{0.0, 0.0}, 0, cfg);
  ASSERT_EQ(pe.size(), cfg.model_dim);
  for (std::size_t i = 0; i < pe.size(); ++i) {
    EXPECT_EQ(pe[i], i % 2 == 0 ? 0.0 : 1.0);
  }
  EXPECT_EQ(pos_encode<double>(Pose{3.2, -1.0}, 4, cfg), pos_encode<double>(Pose{3.2, -1.0}, 4, cfg));
}

TEST(PosEncode, DistinctOverPositionGrid)
{
  const EncoderConfig cfg = model_config("tf12-ref").encoder;
  std::vector<Tensor<double>> enc;
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      enc.push_back(pos_encode<double>(Pose{double(i), double(j)}, 0, cfg));
    }
  }
  double min_dist = 1e9;
  for (std::size_t a = 0; a < enc.size(); ++a) {
    for (std::size_t b = a + 1; b < enc.size(); ++b) {
      double d = 0.0;
      for (std::size_t k = 0; k < cfg.model_dim; ++k) {
        d += (enc[a][k] - enc[b][k]) * (enc[a][k] - enc[b][k]);
      }
      min_dist = std::min(min_dist, d);
    }
  }
  EXPECT_GT(min_dist, 0.0);
}

TEST(Fuse, HadamardIdentities)
{
  Rng rng(8);
  Tape<double> tape;
  auto patch = random_tensor(rng, {5, 8});
  auto pos = random_tensor(rng, {5, 8});
  auto ones = tape.constant(Tensor<double>(Shape{5, 8}, 1.0));
  auto zeros = tape.constant(Tensor<double>(Shape{5, 8}));
  auto p = tape.constant(patch);
  auto q = tape.constant(pos);
  auto f1 = fuse(ones, p, q).value();
  auto f0 = fuse(zeros, p, q).value();
  for (std::size_t i = 0; i < f1.size(); ++i) {
    EXPECT_EQ(f1[i], patch[i] + pos[i]);
    EXPECT_EQ(f0[i], 0.0);
  }
  EXPECT_THROW(fuse(ones, p, tape.constant(Tensor<double>(Shape{5, 7}))), DimensionError);
}

TEST(Fuse, MatchesScalarLoop)
{
  Rng rng(9);
  Tape<double> tape;
  for (int rep = 0; rep < 20; ++rep) {
    auto e = random_tensor(rng, {4, 8});
    auto p = random_tensor(rng, {4, 8});
    auto q = random_tensor(rng, {4, 8});
    auto f = fuse(tape.constant(e), tape.constant(p), tape.constant(q)).value();
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 8; ++c) {
        EXPECT_NEAR(f.at(r, c), e.at(r, c) * (q.at(r, c) + p.at(r, c)), 1e-7);
      }
    }
  }
}

TEST(Encode, DefaultLatentShape)
{
  auto model = Model<float>::initialized(model_config("tf12-ref"), 3);
  Rng rng(3);
  Scene s = random_scene(rng, 3, 20);
  Tape<float> tape;
  auto w = bind(tape, model, false);
  EXPECT_EQ(encode_scene(w, s).shape(), (Shape{3, 256}));
}

Tensor<double> codes_of(const Model<double> & model, const Scene & s, AttentionProbe<double> * probe = nullptr)
{
  Tape<double> tape;
  auto w = bind(tape, model, false);
  return encode_scene(w, s, {}, probe).value();
}

TEST(Encode, AgentPermutationPermutesCodes)
{
  auto model = Model<double>::initialized(tiny_config(2), 5);
  Rng rng(10);
  for (std::size_t agents = 2; agents <= 6; ++agents) {
    Scene s = random_scene(rng, agents);
    std::vector<std::size_t> perm(agents);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Scene p = s;
    for (std::size_t a = 0; a < agents; ++a) {
      p.tracks[a] = s.tracks[perm[a]];
    }
    auto c = codes_of(model, s);
    auto cp = codes_of(model, p);
    for (std::size_t a = 0; a < agents; ++a) {
      for (std::size_t d = 0; d < c.cols(); ++d) {
        EXPECT_NEAR(cp.at(a, d), c.at(perm[a], d), 1e-6);
      }
    }
  }
}

TEST(Encode, AttentionRowsSumToOne)
{
  auto model = Model<double>::initialized(tiny_config(2, 2), 6);
  Rng rng(11);
  AttentionProbe<double> probe;
  codes_of(model, random_scene(rng, 4), &probe);
  ASSERT_EQ(probe.weights.size(), 4u);
  for (const auto & a : probe.weights) {
    ASSERT_EQ(a.shape(), (Shape{24, 24}));
    for (std::size_t r = 0; r < a.rows(); ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < a.cols(); ++c) {
        s += a.at(r, c);
      }
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  }
}

TEST(Encode, SceneBySceneEqualsSharedTape)
{
  auto model = Model<double>::initialized(tiny_config(2), 7);
  Rng rng(12);
  Scene a = random_scene(rng, 3);
  Scene b = random_scene(rng, 2);
  Tape<double> tape;
  auto w = bind(tape, model, false);
  auto ca = encode_scene(w, a);
  auto cb = encode_scene(w, b);
  auto sa = codes_of(model, a);
  auto sb = codes_of(model, b);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    EXPECT_NEAR(ca.value()[i], sa[i], 1e-6);
  }
  for (std::size_t i = 0; i < sb.size(); ++i) {
    EXPECT_NEAR(cb.value()[i], sb[i], 1e-6);
  }
}

// Plain-loop single pre-norm block, single head.
std::vector<std::vector<double>> reference_block(
  const Model<double> & model, const std::vector<std::vector<double>> & x0)
{
  const auto & P = model.params();
  auto W = [&](const std::string & n) -> const Tensor<double> & { return P.at(n).value; };
  const std::size_t n = x0.size();
  const std::size_t d = x0[0].size();
  auto norm = [&](const std::vector<double> & v, const std::string & g, const std::string & b) {
    double mu = 0.0;
    for (double e : v) mu += e / double(d);
    double var = 0.0;
    for (double e : v) var += (e - mu) * (e - mu) / double(d);
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = (v[i] - mu) / std::sqrt(var + 1e-5) * W(g)[i] + W(b)[i];
    }
    return out;
  };
  auto affine = [&](const std::vector<double> & v, const std::string & w, const std::string & b) {
    const auto & m = W(w);
    std::vector<double> out(m.cols());
    for (std::size_t o = 0; o < m.cols(); ++o) {
      double acc = W(b)[o];
      for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * m.at(i, o);
      out[o] = acc;
    }
    return out;
  };
  const std::string p = "encoder.layers.0.";
  std::vector<std::vector<double>> q(n), k(n), v(n), x = x0;
  for (std::size_t t = 0; t < n; ++t) {
    auto h = norm(x[t], p + "ln1.gain", p + "ln1.bias");
    q[t] = affine(h, p + "attn.query.weight", p + "attn.query.bias");
    k[t] = affine(h, p + "attn.key.weight", p + "attn.key.bias");
    v[t] = affine(h, p + "attn.value.weight", p + "attn.value.bias");
  }
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> s(n);
    double mx = -1e300;
    for (std::size_t u = 0; u < n; ++u) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += q[t][i] * k[u][i];
      s[u] = dot / std::sqrt(double(d));
      mx = std::max(mx, s[u]);
    }
    double z = 0.0;
    for (auto & e : s) z += (e = std::exp(e - mx));
    std::vector<double> ctx(d, 0.0);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t i = 0; i < d; ++i) ctx[i] += s[u] / z * v[u][i];
    auto o = affine(ctx, p + "attn.out.weight", p + "attn.out.bias");
    for (std::size_t i = 0; i < d; ++i) x[t][i] = x0[t][i] + o[i];
  }
  for (std::size_t t = 0; t < n; ++t) {
    auto h = norm(x[t], p + "ln2.gain", p + "ln2.bias");
    auto a = affine(h, p + "mlp.fc1.weight", p + "mlp.fc1.bias");
    for (auto & e : a) e = 0.5 * e * (1.0 + std::erf(e / std::sqrt(2.0)));
    auto m = affine(a, p + "mlp.fc2.weight", p + "mlp.fc2.bias");
    for (std::size_t i = 0; i < d; ++i) x[t][i] += m[i];
    x[t] = norm(x[t], "encoder.final_norm.gain", "encoder.final_norm.bias");
  }
  return x;
}

TEST(Encode, MatchesSingleBlockReference)
{
  auto model = Model<double>::initialized(tiny_config(1, 1), 8);
  Rng rng(13);
  // Non-trivial norm parameters so the reference exercises them.
  for (auto & p : model.params()) {
    if (p.name.find("gain") != std::string::npos || p.name.find("bias") != std::string::npos) {
      p.value = random_tensor(rng, p.value.shape(), 0.5, 1.5);
    }
  }
  const std::size_t agents = 3;
  const std::size_t t = 6;
  auto tokens = random_tensor(rng, {agents * t, 8});
  Tape<double> tape;
  auto w = bind(tape, model, false);
  auto codes = encode(w, tape.constant(tokens), agents).value();

  std::vector<std::vector<double>> x(agents * t, std::vector<double>(8));
  for (std::size_t r = 0; r < agents * t; ++r)
    for (std::size_t c = 0; c < 8; ++c) x[r][c] = tokens.at(r, c);
  auto y = reference_block(model, x);
  const auto & lw = model.params().at("encoder.latent.weight").value;
  const auto & lb = model.params().at("encoder.latent.bias").value;
  for (std::size_t a = 0; a < agents; ++a) {
    for (std::size_t o = 0; o < lw.cols(); ++o) {
      double acc = lb[o];
      for (std::size_t i = 0; i < 8; ++i) acc += y[a * t + t - 1][i] * lw.at(i, o);
      EXPECT_NEAR(codes.at(a, o), acc, 1e-5);
    }
  }
}

TEST(Encode, RejectsBadTokenCounts)
{
  auto model = Model<double>::initialized(tiny_config(), 1);
  Tape<double> tape;
  auto w = bind(tape, model, false);
  EXPECT_THROW(encode(w, tape.constant(Tensor<double>(Shape{7, 8})), 2), DimensionError);
  EXPECT_THROW(encode(w, tape.constant(Tensor<double>(Shape{6, 5})), 1), DimensionError);
}

TEST(Encode, EndToEndGradcheck)
{
  Rng rng(14);
  for (int rep = 0; rep < 5; ++rep) {
    auto model = Model<double>::initialized(tiny_config(2), 20 + rep);
    Scene s = random_scene(rng, 2 + rep % 3);
    auto r = random_tensor(rng, {s.agent_count(), 6});
    const double err = testing::model_gradcheck(
      model,
      [&](const Bound<double> & w) {
        return ops::sum(ops::mul(encode_scene(w, s), w.tape->constant(r)));
      },
      rng);
    EXPECT_LE(err, 1e-4);
  }
}

TEST(Encode, DropoutOnlyWithGenerator)
{
  ModelConfig cfg = tiny_config(2);
  cfg.encoder.dropout = 0.5;
  auto model = Model<double>::initialized(cfg, 1);
  Rng rng(15);
  Scene s = random_scene(rng, 2);
  auto plain = codes_of(model, s);
  EXPECT_EQ(plain, codes_of(model, s));
  Tape<double> tape;
  auto w = bind(tape, model, false);
  Rng drop(3);
  EncodeOptions opts;
  opts.dropout_rng = &drop;
  EXPECT_NE(encode_scene(w, s, opts).value(), plain);
}

}  // namespace
}  // namespace trajformer
