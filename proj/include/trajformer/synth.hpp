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

#ifndef TRAJFORMER__SYNTH_HPP_
#define TRAJFORMER__SYNTH_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "trajformer/scene.hpp"

namespace trajformer
{

enum class Maneuver : std::size_t { kStraight = 0, kLeftTurn = 1, kRightTurn = 2, kLaneChange = 3 };

inline constexpr std::array<Maneuver, 4> kAllManeuvers = {
  Maneuver::kStraight, Maneuver::kLeftTurn, Maneuver::kRightTurn, Maneuver::kLaneChange};

const char * maneuver_name(Maneuver m);

/**
 * @brief Settings for the synthetic driving-scene generator.
 *
 * Every scene uses one maneuver class; all of its agents drive that maneuver
 * along the road at constant speed with Gaussian pose jitter. The road is
 * axis-aligned in one of four orientations.
 */
struct SynthConfig
{
  std::array<std::size_t, 4> per_class = {10, 10, 10, 10};  // indexed by Maneuver
  double speed_min = 2.0;    // m/s
  double speed_max = 6.0;    // m/s
  double noise_sigma = 0.05; // m, clipped at 3 sigma
  std::size_t agents_min = 2;
  std::size_t agents_max = 4;
  std::size_t grid_size = 64;  // cells per side
  double resolution = 1.0;     // m per cell
  double lane_width = 4.0;     // m
  double turn_radius = 10.0;   // m
  std::size_t past_len = 6;
  std::size_t future_len = 6;
  double dt = kTimeStride;

  /// All classes set to n.
  static SynthConfig with_per_class(std::size_t n);
  std::size_t total() const { return per_class[0] + per_class[1] + per_class[2] + per_class[3]; }
  /// Throws ConfigError for infeasible settings.
  void validate() const;
};

/// Scenes in class-major order; deterministic in (cfg, seed).
std::vector<Scene> synth_scenes(const SynthConfig & cfg, std::uint64_t seed);

}  // namespace trajformer

#endif  // TRAJFORMER__SYNTH_HPP_
