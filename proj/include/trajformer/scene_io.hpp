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

#ifndef TRAJFORMER__SCENE_IO_HPP_
#define TRAJFORMER__SCENE_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "trajformer/scene.hpp"

// Scene files are UTF-8 JSON:
//
//   {"version": 1, "resolution": r, "origin": {"x": .., "y": ..},
//    "raster": {"h": H, "w": W, "c": C, "data": base64(f32 LE, H*W*C, row-major)},
//    "mask": {"data": base64(packed bits, row-major, MSB first)},
//    "tracks": [{"id": "...", "past": [[x, y], ...], "future": [[x, y], ...]}]}
//
// A dataset is a directory of scene files plus index.json listing their
// relative paths. The prior is not stored; it is rebuilt from the mask on load.

namespace trajformer
{

inline constexpr int kSceneFormatVersion = 1;
inline constexpr const char * kDatasetIndexName = "index.json";

std::string scene_to_json(const Scene & scene);
/// Throws FormatError with line/field context on malformed input.
Scene scene_from_json(const std::string & text, const SceneShape & shape = {});

void save_scene(const Scene & scene, const std::filesystem::path & path);
Scene load_scene(const std::filesystem::path & path, const SceneShape & shape = {});

struct Dataset
{
  std::vector<std::string> names;  // relative paths from the index
  std::vector<Scene> scenes;

  std::size_t size() const { return scenes.size(); }
  bool empty() const { return scenes.empty(); }
};

/// Writes scene_NNNN.json files and the index; creates `dir` if needed.
void write_dataset(const std::filesystem::path & dir, const std::vector<Scene> & scenes);
Dataset load_dataset(const std::filesystem::path & dir, const SceneShape & shape = {});

}  // namespace trajformer

#endif  // TRAJFORMER__SCENE_IO_HPP_
