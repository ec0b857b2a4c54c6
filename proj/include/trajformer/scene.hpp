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

#ifndef TRAJFORMER__SCENE_HPP_
#define TRAJFORMER__SCENE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajformer/tensor.hpp"

namespace trajformer
{

/// Position in the scene frame, meters.
struct Pose
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Pose &, const Pose &) = default;
};

using Trajectory = std::vector<Pose>;

struct AgentTrack
{
  std::string id;
  Trajectory past;    // oldest first; past.back() is the latest observation
  Trajectory future;  // ground truth, one pose per prediction step

  friend bool operator==(const AgentTrack &, const AgentTrack &) = default;
};

/**
 * @brief Geometry shared by the raster, the mask and the prior.
 *
 * Cell (row, col) covers x in [origin.x + col*res, origin.x + (col+1)*res)
 * and y in [origin.y + row*res, origin.y + (row+1)*res).
 */
struct GridGeometry
{
  std::size_t height = 0;
  std::size_t width = 0;
  double resolution = 1.0;  // meters per cell
  Pose origin;

  /// Cell containing p, or nullopt when p lies outside the grid.
  std::optional<std::pair<std::size_t, std::size_t>> cell_of(const Pose & p) const;
  /// Signed cell indices (floor), valid for positions outside the grid too.
  std::pair<long long, long long> cell_index(const Pose & p) const;
  Pose cell_center(std::size_t row, std::size_t col) const;
  std::size_t cells() const { return height * width; }

  friend bool operator==(const GridGeometry &, const GridGeometry &) = default;
};

/// Birds-eye-view raster, H x W x C row-major (channel fastest), values in [0, 1].
struct BevRaster
{
  GridGeometry grid;
  std::size_t channels = 0;
  std::vector<float> data;

  float at(std::size_t row, std::size_t col, std::size_t ch) const
  {
    return data[(row * grid.width + col) * channels + ch];
  }
  float & at(std::size_t row, std::size_t col, std::size_t ch)
  {
    return data[(row * grid.width + col) * channels + ch];
  }

  friend bool operator==(const BevRaster &, const BevRaster &) = default;
};

struct DrivableMask
{
  GridGeometry grid;
  std::vector<std::uint8_t> cells;  // 1 = drivable, row-major

  bool drivable(std::size_t row, std::size_t col) const
  {
    return cells[row * grid.width + col] != 0;
  }
  /// False for positions outside the grid.
  bool drivable_at(const Pose & p) const;
  std::size_t drivable_count() const;

  friend bool operator==(const DrivableMask &, const DrivableMask &) = default;
};

/// Discrete spatial distribution over the grid cells.
struct PriorGrid
{
  GridGeometry grid;
  std::vector<double> mass;  // row-major, sums to 1
  double floor = 0.0;        // mass of each non-drivable cell

  double at(std::size_t row, std::size_t col) const { return mass[row * grid.width + col]; }

  friend bool operator==(const PriorGrid &, const PriorGrid &) = default;
};

struct Scene
{
  BevRaster raster;
  DrivableMask mask;
  PriorGrid prior;
  std::vector<AgentTrack> tracks;

  std::size_t agent_count() const { return tracks.size(); }

  friend bool operator==(const Scene &, const Scene &) = default;
};

/// Track lengths and spatial margin a scene must satisfy.
struct SceneShape
{
  std::size_t past_len = 6;
  std::size_t future_len = 6;
  double margin = 4.0;  // meters allowed outside the raster extent
};

inline constexpr double kDefaultPriorFloor = 1e-6;
inline constexpr double kTimeStride = 0.5;  // seconds between poses

/// Throws FormatError naming the violated invariant.
void validate_scene(const Scene & scene, const SceneShape & shape = {});

/**
 * @brief m x m x C crop centered on the cell containing `center`.
 *
 * The crop covers rows [r - m/2, r + m/2) and cols [c - m/2, c + m/2).
 * Cells outside the raster are 0. Throws ConfigError unless m is even and >= 2.
 */
Tensor<float> extract_patch(const BevRaster & raster, const Pose & center, std::size_t m);

/**
 * @brief Prior with mass `eps` on every non-drivable cell and the remainder
 * spread uniformly over drivable cells.
 *
 * Requires 0 < eps < 1/(H*W) and at least one drivable cell.
 */
PriorGrid build_prior(const DrivableMask & mask, double eps = kDefaultPriorFloor);

/// log p and its partial derivatives w.r.t. the query position.
struct PriorSample
{
  double log_prob = 0.0;
  double d_dx = 0.0;
  double d_dy = 0.0;
};

/**
 * @brief Log of the bilinear interpolation of cell masses at p.
 *
 * Cell masses sit at cell centers; positions beyond the outermost centers
 * clamp to the boundary (zero derivative along the clamped axis).
 */
PriorSample prior_sample(const PriorGrid & prior, const Pose & p);

inline double prior_logprob(const PriorGrid & prior, const Pose & p)
{
  return prior_sample(prior, p).log_prob;
}

}  // namespace trajformer

#endif  // TRAJFORMER__SCENE_HPP_
