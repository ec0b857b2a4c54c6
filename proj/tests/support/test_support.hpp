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

#ifndef TRAJFORMER_TESTS__TEST_SUPPORT_HPP_
#define TRAJFORMER_TESTS__TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "trajformer/config.hpp"
#include "trajformer/model.hpp"
#include "trajformer/rng.hpp"
#include "trajformer/scene.hpp"
#include "trajformer/tape.hpp"

namespace trajformer::testing
{

inline Tensor<double> random_tensor(Rng & rng, Shape shape, double lo = -1.0, double hi = 1.0)
{
  Tensor<double> t(std::move(shape));
  std::uniform_real_distribution<double> u(lo, hi);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = u(rng);
  }
  return t;
}

/// ||a - b|| / max(||a||, ||b||, 1e-6) over all entries.
inline double relative_error(const std::vector<double> & a, const std::vector<double> & b)
{
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-6});
}

using ScalarFn = std::function<Var<double>(Tape<double> &, const std::vector<Var<double>> &)>;

/**
 * Central-difference check of d f / d inputs. Every input is a leaf that
 * requires a gradient. Returns the norm-wise relative error.
 */
inline double gradcheck(const std::vector<Tensor<double>> & inputs, const ScalarFn & f, double h = 1e-5)
{
  std::vector<double> analytic;
  {
    Tape<double> tape;
    std::vector<Var<double>> leaves;
    for (const auto & x : inputs) {
      leaves.push_back(tape.leaf(x, true));
    }
    Var<double> y = f(tape, leaves);
    tape.backward(y);
    for (const auto & l : leaves) {
      const auto & g = tape.grad(l);
      analytic.insert(analytic.end(), g.data().begin(), g.data().end());
    }
  }
  auto eval = [&](const std::vector<Tensor<double>> & xs) {
    Tape<double> tape;
    std::vector<Var<double>> leaves;
    for (const auto & x : xs) {
      leaves.push_back(tape.leaf(x, false));
    }
    return f(tape, leaves).value()[0];
  };
  std::vector<double> numeric;
  std::vector<Tensor<double>> work = inputs;
  for (std::size_t k = 0; k < work.size(); ++k) {
    for (std::size_t i = 0; i < work[k].size(); ++i) {
      const double x0 = work[k][i];
      work[k][i] = x0 + h;
      const double up = eval(work);
      work[k][i] = x0 - h;
      const double down = eval(work);
      work[k][i] = x0;
      numeric.push_back((up - down) / (2.0 * h));
    }
  }
  return relative_error(analytic, numeric);
}

using ModelFn = std::function<Var<double>(const Bound<double> &)>;

/**
 * Gradcheck of a scalar model function w.r.t. its weights. At most
 * `per_tensor` coordinates of each weight tensor are perturbed (chosen by
 * `rng`); the error is norm-wise over the checked coordinates.
 */
inline double model_gradcheck(
  Model<double> & model, const ModelFn & f, Rng & rng, std::size_t per_tensor = 4, double h = 1e-5)
{
  std::vector<Tensor<double>> grads;
  {
    Tape<double> tape;
    Bound<double> w = bind(tape, model, true);
    tape.backward(f(w));
    for (const auto & v : w.vars) {
      grads.push_back(tape.grad(v));
    }
  }
  auto eval = [&]() {
    Tape<double> tape;
    Bound<double> w = bind(tape, model, false);
    return f(w).value()[0];
  };
  std::vector<double> analytic;
  std::vector<double> numeric;
  for (std::size_t p = 0; p < model.params().size(); ++p) {
    Tensor<double> & value = model.params()[p].value;
    std::uniform_int_distribution<std::size_t> pick(0, value.size() - 1);
    const std::size_t n = std::min(per_tensor, value.size());
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t i = value.size() <= per_tensor ? c : pick(rng);
      const double x0 = value[i];
      value[i] = x0 + h;
      const double up = eval();
      value[i] = x0 - h;
      const double down = eval();
      value[i] = x0;
      numeric.push_back((up - down) / (2.0 * h));
      analytic.push_back(grads[p][i]);
    }
  }
  return relative_error(analytic, numeric);
}

/// Small widths for fast gradient checks and property tests.
inline ModelConfig tiny_config(std::size_t layers = 1, std::size_t heads = 2)
{
  ModelConfig c;
  c.name = "tiny";
  c.encoder.pose_width = 8;
  c.encoder.model_dim = 8;
  c.encoder.heads = heads;
  c.encoder.layers = layers;
  c.encoder.latent_dim = 6;
  c.encoder.subpatch = 2;
  c.encoder.crop = 4;
  c.encoder.mlp_ratio = 2;
  c.flow.hidden = 5;
  c.flow.head_hidden = 6;
  c.validate();
  return c;
}

/**
 * Random scene on a size x size grid with a random drivable blob, random
 * raster values and `agents` tracks of short random walks near the center.
 */
inline Scene random_scene(Rng & rng, std::size_t agents, std::size_t size = 12, std::size_t past = 6, std::size_t future = 6)
{
  Scene s;
  GridGeometry g{size, size, 1.0, Pose{0.0, 0.0}};
  s.raster.grid = g;
  s.raster.channels = 3;
  s.raster.data.resize(g.cells() * 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto & v : s.raster.data) {
    v = static_cast<float>(u(rng));
  }
  s.mask.grid = g;
  s.mask.cells.resize(g.cells());
  for (auto & c : s.mask.cells) {
    c = u(rng) < 0.7 ? 1 : 0;
  }
  s.mask.cells[0] = 1;
  s.prior = build_prior(s.mask, 1e-4);
  std::normal_distribution<double> step(0.0, 0.6);
  const double mid = static_cast<double>(size) / 2.0;
  for (std::size_t a = 0; a < agents; ++a) {
    AgentTrack t;
    t.id = "agent_" + std::to_string(a);
    Pose p{mid + 2.0 * (u(rng) - 0.5), mid + 2.0 * (u(rng) - 0.5)};
    for (std::size_t i = 0; i < past + future; ++i) {
      p.x += step(rng);
      p.y += step(rng);
      (i < past ? t.past : t.future).push_back(p);
    }
    s.tracks.push_back(std::move(t));
  }
  return s;
}

/// Fresh, empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string & name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("trajformer_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<std::uint8_t> file_bytes(const std::filesystem::path & p)
{
  std::ifstream in(p, std::ios::binary);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Relative path -> bytes for every regular file under `dir`, sorted by path.
inline std::vector<std::pair<std::string, std::vector<std::uint8_t>>> directory_bytes(
  const std::filesystem::path & dir)
{
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> out;
  for (const auto & e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      out.emplace_back(std::filesystem::relative(e.path(), dir).string(), file_bytes(e.path()));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace trajformer::testing

#endif  // TRAJFORMER_TESTS__TEST_SUPPORT_HPP_
