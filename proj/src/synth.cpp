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

#include "trajformer/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "trajformer/errors.hpp"
#include "trajformer/rng.hpp"

namespace trajformer
{

const char * maneuver_name(Maneuver m)
{
  switch (m) {
    case Maneuver::kStraight:
      return "straight";
    case Maneuver::kLeftTurn:
      return "left-turn";
    case Maneuver::kRightTurn:
      return "right-turn";
    case Maneuver::kLaneChange:
      return "lane-change";
  }
  return "unknown";
}

SynthConfig SynthConfig::with_per_class(std::size_t n)
{
  SynthConfig cfg;
  cfg.per_class = {n, n, n, n};
  return cfg;
}

namespace
{

constexpr double kEdgeMargin = 2.0;  // m kept free between paths and the raster border
constexpr double kPathStep = 0.25;   // m between polyline samples

double half_extent(const SynthConfig & cfg)
{
  return 0.5 * static_cast<double>(cfg.grid_size) * cfg.resolution;
}

}  // namespace

void SynthConfig::validate() const
{
  if (grid_size < 8) {
    throw ConfigError("synth: grid_size must be >= 8 cells");
  }
  if (!(resolution > 0.0)) {
    throw ConfigError("synth: resolution must be positive");
  }
  if (!(speed_min > 0.0) || speed_max < speed_min) {
    throw ConfigError("synth: need 0 < speed_min <= speed_max");
  }
  if (noise_sigma < 0.0) {
    throw ConfigError("synth: noise_sigma must be >= 0");
  }
  if (agents_min < 1 || agents_max < agents_min) {
    throw ConfigError("synth: need 1 <= agents_min <= agents_max");
  }
  if (past_len < 2 || future_len < 1) {
    throw ConfigError("synth: need past_len >= 2 and future_len >= 1");
  }
  if (!(dt > 0.0) || !(lane_width > 0.0) || !(turn_radius > 0.0)) {
    throw ConfigError("synth: dt, lane_width and turn_radius must be positive");
  }
  const double usable = 2.0 * (half_extent(*this) - kEdgeMargin);
  const double travel = speed_max * dt * static_cast<double>(past_len + future_len);
  if (travel > 0.8 * usable) {
    throw ConfigError(
      "synth: infeasible config, speed_max*dt*(past_len+future_len) = " + std::to_string(travel) +
      " m exceeds the usable grid extent of " + std::to_string(0.8 * usable) + " m");
  }
  if (3.0 * noise_sigma + resolution > 0.5 * lane_width) {
    throw ConfigError("synth: noise_sigma too large for the lane corridor");
  }
  if (turn_radius + kEdgeMargin >= half_extent(*this)) {
    throw ConfigError("synth: turn_radius does not fit in the grid");
  }
}

namespace
{

struct Polyline
{
  std::vector<Pose> pts;
  std::vector<double> cum;  // arc length at each point

  void push(Pose p)
  {
    if (pts.empty()) {
      cum.push_back(0.0);
    } else {
      cum.push_back(cum.back() + std::hypot(p.x - pts.back().x, p.y - pts.back().y));
    }
    pts.push_back(p);
  }

  double length() const { return cum.empty() ? 0.0 : cum.back(); }

  Pose at(double s) const
  {
    if (s <= 0.0) {
      return pts.front();
    }
    if (s >= length()) {
      return pts.back();
    }
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - cum.begin());
    const double seg = cum[i] - cum[i - 1];
    const double f = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
    return Pose{
      pts[i - 1].x + f * (pts[i].x - pts[i - 1].x), pts[i - 1].y + f * (pts[i].y - pts[i - 1].y)};
  }

  /// Arc length of the first point with x >= x0 (paths running along +x).
  double arc_at_x(double x0) const
  {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].x >= x0) {
        return cum[i];
      }
    }
    return length();
  }

  double distance(const Pose & p) const
  {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const Pose & a = pts[i];
      const Pose & b = pts[i + 1];
      const double dx = b.x - a.x;
      const double dy = b.y - a.y;
      const double len2 = dx * dx + dy * dy;
      double f = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
      f = std::clamp(f, 0.0, 1.0);
      best = std::min(best, std::hypot(p.x - (a.x + f * dx), p.y - (a.y + f * dy)));
    }
    return best;
  }
};

Polyline straight_line(double x0, double x1, double y)
{
  Polyline line;
  for (double x = x0; x < x1; x += kPathStep) {
    line.push(Pose{x, y});
  }
  line.push(Pose{x1, y});
  return line;
}

// Enters along +x at y = 0, turns through a quarter circle and exits along
// +y (sign = +1, left) or -y (sign = -1, right).
Polyline turn_path(double reach, double radius, double sign)
{
  Polyline path;
  for (double x = -reach; x < 0.0; x += kPathStep) {
    path.push(Pose{x, 0.0});
  }
  const std::size_t arc_steps =
    static_cast<std::size_t>(std::ceil(0.5 * std::numbers::pi * radius / kPathStep));
  for (std::size_t k = 0; k <= arc_steps; ++k) {
    const double th = 0.5 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(arc_steps);
    path.push(Pose{radius * std::sin(th), sign * (radius - radius * std::cos(th))});
  }
  for (double y = radius + kPathStep; y < reach; y += kPathStep) {
    path.push(Pose{radius, sign * y});
  }
  path.push(Pose{radius, sign * reach});
  return path;
}

// Lateral move from y_from to y_to with a cosine blend over [x_a, x_a + len].
Polyline lane_change_path(double reach, double y_from, double y_to, double x_a, double len)
{
  Polyline path;
  for (double x = -reach; x < reach; x += kPathStep) {
    const double u = std::clamp((x - x_a) / len, 0.0, 1.0);
    const double blend = 0.5 - 0.5 * std::cos(std::numbers::pi * u);
    path.push(Pose{x, y_from + (y_to - y_from) * blend});
  }
  path.push(Pose{reach, y_to});
  return path;
}

Pose rotate_quarter(const Pose & p, int quarter_turns)
{
  Pose q = p;
  for (int k = 0; k < quarter_turns; ++k) {
    q = Pose{-q.y, q.x};
  }
  return q;
}

Scene make_scene(const SynthConfig & cfg, Maneuver kind, Rng & rng)
{
  const double extent = half_extent(cfg);
  const double reach = extent - kEdgeMargin;
  const std::size_t n_steps = cfg.past_len + cfg.future_len;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int quarter_turns = static_cast<int>(std::uniform_int_distribution<int>(0, 3)(rng));
  const std::size_t agents =
    std::uniform_int_distribution<std::size_t>(cfg.agents_min, cfg.agents_max)(rng);

  // Road centerline and corridor half-width in the local frame.
  Polyline road;
  double road_half_width = 0.0;
  bool two_lane = false;
  switch (kind) {
    case Maneuver::kStraight:
    case Maneuver::kLaneChange:
      road = straight_line(-reach, reach, 0.0);
      road_half_width = cfg.lane_width;
      two_lane = true;
      break;
    case Maneuver::kLeftTurn:
      road = turn_path(reach, cfg.turn_radius, 1.0);
      road_half_width = 0.75 * cfg.lane_width;
      break;
    case Maneuver::kRightTurn:
      road = turn_path(reach, cfg.turn_radius, -1.0);
      road_half_width = 0.75 * cfg.lane_width;
      break;
  }

  std::vector<Trajectory> local_tracks;
  for (std::size_t a = 0; a < agents; ++a) {
    const double speed = cfg.speed_min + (cfg.speed_max - cfg.speed_min) * unit(rng);
    const double window = speed * cfg.dt * static_cast<double>(n_steps - 1);
    Polyline path;
    double s0 = 0.0;
    if (kind == Maneuver::kStraight) {
      const double lane = unit(rng) < 0.5 ? -0.5 : 0.5;
      path = straight_line(-reach, reach, lane * cfg.lane_width);
      s0 = (path.length() - window) * unit(rng);
    } else if (kind == Maneuver::kLaneChange) {
      const double from = unit(rng) < 0.5 ? -0.5 : 0.5;
      // The lateral move adds arc length; retry until the window fits.
      for (int attempt = 0;; ++attempt) {
        const double x0 = -reach + (2.0 * reach - 1.2 * window) * unit(rng);
        const double x_a = x0 + window * (0.1 + 0.3 * unit(rng));
        const double len = std::max(0.5 * window, 6.0);
        path = lane_change_path(reach, from * cfg.lane_width, -from * cfg.lane_width, x_a, len);
        s0 = path.arc_at_x(x0);
        if (s0 + window <= path.length() || attempt > 32) {
          s0 = std::min(s0, path.length() - window);
          break;
        }
      }
    } else {
      path = road;
      const double s_turn = reach;  // arc length where the quarter circle starts
      const double lo = std::max(0.0, s_turn - window);
      const double hi = std::min(s_turn, path.length() - window);
      s0 = lo + (hi - lo) * unit(rng);
    }
    Trajectory traj;
    for (std::size_t k = 0; k < n_steps; ++k) {
      Pose p = path.at(s0 + speed * cfg.dt * static_cast<double>(k));
      const double clip = 3.0 * cfg.noise_sigma;
      p.x += std::clamp(cfg.noise_sigma * gauss(rng), -clip, clip);
      p.y += std::clamp(cfg.noise_sigma * gauss(rng), -clip, clip);
      traj.push_back(p);
    }
    local_tracks.push_back(std::move(traj));
  }

  Scene scene;
  GridGeometry & g = scene.raster.grid;
  g.height = cfg.grid_size;
  g.width = cfg.grid_size;
  g.resolution = cfg.resolution;
  g.origin = Pose{0.0, 0.0};
  const Pose center{extent, extent};
  auto to_scene = [&](const Pose & local) {
    const Pose r = rotate_quarter(local, quarter_turns);
    return Pose{center.x + r.x, center.y + r.y};
  };
  auto to_local = [&](const Pose & world) {
    return rotate_quarter(Pose{world.x - center.x, world.y - center.y}, (4 - quarter_turns) % 4);
  };

  scene.raster.channels = 3;
  scene.raster.data.assign(g.cells() * 3, 0.0f);
  scene.mask.grid = g;
  scene.mask.cells.assign(g.cells(), 0);
  for (std::size_t r = 0; r < g.height; ++r) {
    for (std::size_t c = 0; c < g.width; ++c) {
      const Pose local = to_local(g.cell_center(r, c));
      const double d = road.distance(local);
      if (d <= road_half_width) {
        scene.mask.cells[r * g.width + c] = 1;
        scene.raster.at(r, c, 0) = 1.0f;
      }
      const bool edge = std::abs(d - road_half_width) < 0.5 * cfg.resolution;
      const bool divider = two_lane && std::abs(local.y) < 0.5 * cfg.resolution &&
                           std::abs(local.x) <= reach;
      if (edge || divider) {
        scene.raster.at(r, c, 2) = 1.0f;
      }
    }
  }

  for (std::size_t a = 0; a < agents; ++a) {
    AgentTrack track;
    track.id = "agent_" + std::to_string(a);
    for (std::size_t k = 0; k < n_steps; ++k) {
      const Pose p = to_scene(local_tracks[a][k]);
      if (k < cfg.past_len) {
        track.past.push_back(p);
        if (const auto cell = g.cell_of(p)) {
          float & v = scene.raster.at(cell->first, cell->second, 1);
          v = std::max(v, static_cast<float>(k + 1) / static_cast<float>(cfg.past_len));
        }
      } else {
        track.future.push_back(p);
      }
    }
    scene.tracks.push_back(std::move(track));
  }

  scene.prior = build_prior(scene.mask, std::min(kDefaultPriorFloor, 0.5 / static_cast<double>(g.cells())));
  for (const auto & t : scene.tracks) {
    for (const auto * traj : {&t.past, &t.future}) {
      for (const Pose & p : *traj) {
        if (!scene.mask.drivable_at(p)) {
          throw std::logic_error(
            std::string("synth: generated ") + maneuver_name(kind) +
            " pose left the drivable corridor");
        }
      }
    }
  }
  return scene;
}

}  // namespace

std::vector<Scene> synth_scenes(const SynthConfig & cfg, std::uint64_t seed)
{
  cfg.validate();
  std::vector<Scene> scenes;
  scenes.reserve(cfg.total());
  for (Maneuver kind : kAllManeuvers) {
    const auto cls = static_cast<std::size_t>(kind);
    for (std::size_t i = 0; i < cfg.per_class[cls]; ++i) {
      Rng rng = substream(seed, "synth", {cls, i});
      scenes.push_back(make_scene(cfg, kind, rng));
    }
  }
  return scenes;
}

}  // namespace trajformer
