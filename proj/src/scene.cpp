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

#include "trajformer/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trajformer/errors.hpp"

namespace trajformer
{

std::pair<long long, long long> GridGeometry::cell_index(const Pose & p) const
{
  const auto col = static_cast<long long>(std::floor((p.x - origin.x) / resolution));
  const auto row = static_cast<long long>(std::floor((p.y - origin.y) / resolution));
  return {row, col};
}

std::optional<std::pair<std::size_t, std::size_t>> GridGeometry::cell_of(const Pose & p) const
{
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    return std::nullopt;
  }
  const auto [row, col] = cell_index(p);
  if (
    row < 0 || col < 0 || row >= static_cast<long long>(height) ||
    col >= static_cast<long long>(width))
  {
    return std::nullopt;
  }
  return std::make_pair(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
}

Pose GridGeometry::cell_center(std::size_t row, std::size_t col) const
{
  return Pose{
    origin.x + (static_cast<double>(col) + 0.5) * resolution,
    origin.y + (static_cast<double>(row) + 0.5) * resolution};
}

bool DrivableMask::drivable_at(const Pose & p) const
{
  const auto cell = grid.cell_of(p);
  return cell && drivable(cell->first, cell->second);
}

std::size_t DrivableMask::drivable_count() const
{
  return static_cast<std::size_t>(std::count_if(
    cells.begin(), cells.end(), [](std::uint8_t c) { return c != 0; }));
}

namespace
{

void check_track(const AgentTrack & track, const SceneShape & shape, const GridGeometry & grid)
{
  if (track.past.size() != shape.past_len) {
    throw FormatError(
      "track '" + track.id + "': past has " + std::to_string(track.past.size()) +
      " poses, expected " + std::to_string(shape.past_len));
  }
  if (track.future.size() != shape.future_len) {
    throw FormatError(
      "track '" + track.id + "': future has " + std::to_string(track.future.size()) +
      " poses, expected " + std::to_string(shape.future_len));
  }
  const double x0 = grid.origin.x - shape.margin;
  const double y0 = grid.origin.y - shape.margin;
  const double x1 = grid.origin.x + grid.resolution * static_cast<double>(grid.width) + shape.margin;
  const double y1 = grid.origin.y + grid.resolution * static_cast<double>(grid.height) + shape.margin;
  auto check = [&](const Trajectory & traj, const char * which) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const Pose & p = traj[i];
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw FormatError(
          "track '" + track.id + "': " + which + "[" + std::to_string(i) + "] is not finite");
      }
      if (p.x < x0 || p.x > x1 || p.y < y0 || p.y > y1) {
        throw FormatError(
          "track '" + track.id + "': " + which + "[" + std::to_string(i) +
          "] lies outside the raster extent plus margin");
      }
    }
  };
  check(track.past, "past");
  check(track.future, "future");
}

}  // namespace

void validate_scene(const Scene & scene, const SceneShape & shape)
{
  const GridGeometry & g = scene.raster.grid;
  if (!(g.resolution > 0.0) || !std::isfinite(g.resolution)) {
    throw FormatError("raster resolution must be positive");
  }
  if (g.height == 0 || g.width == 0 || scene.raster.channels == 0) {
    throw FormatError("raster must have nonzero height, width and channels");
  }
  if (scene.raster.data.size() != g.cells() * scene.raster.channels) {
    throw FormatError(
      "raster data holds " + std::to_string(scene.raster.data.size()) + " values, expected " +
      std::to_string(g.cells() * scene.raster.channels));
  }
  for (float v : scene.raster.data) {
    if (!std::isfinite(v)) {
      throw FormatError("raster data is not finite");
    }
  }
  if (!(scene.mask.grid == g) || scene.mask.cells.size() != g.cells()) {
    throw FormatError("mask grid does not match raster grid");
  }
  if (!(scene.prior.grid == g) || scene.prior.mass.size() != g.cells()) {
    throw FormatError("prior grid does not match raster grid");
  }
  if (scene.tracks.empty()) {
    throw FormatError("scene must contain at least one agent track");
  }
  for (const auto & t : scene.tracks) {
    check_track(t, shape, g);
  }
}

Tensor<float> extract_patch(const BevRaster & raster, const Pose & center, std::size_t m)
{
  if (m < 2 || m % 2 != 0) {
    throw ConfigError("patch size must be even and >= 2, got " + std::to_string(m));
  }
  const std::size_t c = raster.channels;
  Tensor<float> patch(Shape{m, m, c});
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
    return patch;
  }
  const auto [row, col] = raster.grid.cell_index(center);
  const long long half = static_cast<long long>(m / 2);
  const auto h = static_cast<long long>(raster.grid.height);
  const auto w = static_cast<long long>(raster.grid.width);
  for (std::size_t i = 0; i < m; ++i) {
    const long long r = row - half + static_cast<long long>(i);
    if (r < 0 || r >= h) {
      continue;
    }
    for (std::size_t j = 0; j < m; ++j) {
      const long long cc = col - half + static_cast<long long>(j);
      if (cc < 0 || cc >= w) {
        continue;
      }
      for (std::size_t ch = 0; ch < c; ++ch) {
        patch[(i * m + j) * c + ch] =
          raster.at(static_cast<std::size_t>(r), static_cast<std::size_t>(cc), ch);
      }
    }
  }
  return patch;
}

PriorGrid build_prior(const DrivableMask & mask, double eps)
{
  const std::size_t cells = mask.grid.cells();
  if (cells == 0 || mask.cells.size() != cells) {
    throw ConfigError("prior: mask is empty or inconsistent with its grid");
  }
  if (!(eps > 0.0) || !(eps < 1.0 / static_cast<double>(cells))) {
    throw ConfigError(
      "prior floor must satisfy 0 < eps < 1/(H*W) = " +
      std::to_string(1.0 / static_cast<double>(cells)));
  }
  const std::size_t drivable = mask.drivable_count();
  if (drivable == 0) {
    throw ConfigError("prior: mask has no drivable cell (degenerate prior)");
  }
  const std::size_t blocked = cells - drivable;
  const double road_mass =
    (1.0 - static_cast<double>(blocked) * eps) / static_cast<double>(drivable);
  PriorGrid prior;
  prior.grid = mask.grid;
  prior.floor = eps;
  prior.mass.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    prior.mass[i] = mask.cells[i] != 0 ? road_mass : eps;
  }
  return prior;
}

namespace
{

// Continuous index along one axis: base cell, fraction, and d(index)/d(position).
struct AxisLerp
{
  std::size_t lo = 0;
  std::size_t hi = 0;
  double frac = 0.0;
  double dfrac = 0.0;
};

AxisLerp axis_lerp(double coord, double origin, double res, std::size_t n)
{
  AxisLerp a;
  if (n == 1) {
    return a;
  }
  const double u = (coord - origin) / res - 0.5;
  const double top = static_cast<double>(n - 1);
  if (u <= 0.0) {
    a.lo = 0;
    a.hi = 1;
    a.frac = 0.0;
    a.dfrac = u < 0.0 ? 0.0 : 1.0 / res;
    return a;
  }
  if (u >= top) {
    a.lo = n - 2;
    a.hi = n - 1;
    a.frac = 1.0;
    a.dfrac = u > top ? 0.0 : 1.0 / res;
    return a;
  }
  const double base = std::floor(u);
  a.lo = static_cast<std::size_t>(base);
  a.hi = a.lo + 1;
  a.frac = u - base;
  a.dfrac = 1.0 / res;
  return a;
}

}  // namespace

PriorSample prior_sample(const PriorGrid & prior, const Pose & p)
{
  const GridGeometry & g = prior.grid;
  const AxisLerp cx = axis_lerp(p.x, g.origin.x, g.resolution, g.width);
  const AxisLerp cy = axis_lerp(p.y, g.origin.y, g.resolution, g.height);
  const double m00 = prior.at(cy.lo, cx.lo);
  const double m01 = prior.at(cy.lo, cx.hi);
  const double m10 = prior.at(cy.hi, cx.lo);
  const double m11 = prior.at(cy.hi, cx.hi);
  const double fx = cx.frac;
  const double fy = cy.frac;
  const double value = (1.0 - fy) * ((1.0 - fx) * m00 + fx * m01) + fy * ((1.0 - fx) * m10 + fx * m11);
  const double dv_dfx = (1.0 - fy) * (m01 - m00) + fy * (m11 - m10);
  const double dv_dfy = (1.0 - fx) * (m10 - m00) + fx * (m11 - m01);
  PriorSample s;
  s.log_prob = std::log(value);
  s.d_dx = dv_dfx * cx.dfrac / value;
  s.d_dy = dv_dfy * cy.dfrac / value;
  return s;
}

}  // namespace trajformer
