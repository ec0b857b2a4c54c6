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

#ifndef TRAJFORMER__CLI_HPP_
#define TRAJFORMER__CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "trajformer/metrics.hpp"
#include "trajformer/prediction.hpp"
#include "trajformer/scene.hpp"

namespace trajformer::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/**
 * @brief Runs one command. `args` excludes the program name.
 *
 * Commands: synth, train, predict, eval, params, plot. Returns 0 on success,
 * 2 on a usage error (usage text on `err`), 1 on a runtime error.
 */
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

/// SVG with the drivable mask, observed pasts, ground truth and one path per sample.
std::string render_svg(const Scene & scene, const Prediction & pred);

}  // namespace trajformer::cli

#endif  // TRAJFORMER__CLI_HPP_
