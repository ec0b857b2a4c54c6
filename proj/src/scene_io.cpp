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

#include "trajformer/scene_io.hpp"

#include <algorithm>
#include <cstdio>

#include "base64.hpp"
#include "binary.hpp"
#include "json.hpp"
#include "trajformer/errors.hpp"

namespace trajformer
{

using nlohmann::json;

namespace
{

json trajectory_to_json(const Trajectory & traj)
{
  json arr = json::array();
  for (const Pose & p : traj) {
    arr.push_back(json::array({p.x, p.y}));
  }
  return arr;
}

std::vector<std::uint8_t> pack_bits(const std::vector<std::uint8_t> & cells)
{
  std::vector<std::uint8_t> out((cells.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] != 0) {
      out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
  }
  return out;
}

const json & field(const json & obj, const char * key, const std::string & where)
{
  if (!obj.is_object()) {
    throw FormatError("scene: '" + where + "' must be an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError("scene: missing field '" + where + (where.empty() ? "" : ".") + key + "'");
  }
  return *it;
}

double number(const json & v, const std::string & where)
{
  if (!v.is_number()) {
    throw FormatError("scene: field '" + where + "' must be a number");
  }
  return v.get<double>();
}

std::size_t count(const json & v, const std::string & where)
{
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw FormatError("scene: field '" + where + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

Trajectory trajectory_from_json(const json & v, const std::string & where)
{
  if (!v.is_array()) {
    throw FormatError("scene: field '" + where + "' must be an array of [x, y]");
  }
  Trajectory out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json & p = v[i];
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2) {
      throw FormatError("scene: field '" + at + "' must be [x, y]");
    }
    out.push_back(Pose{number(p[0], at + "[0]"), number(p[1], at + "[1]")});
  }
  return out;
}

}  // namespace

std::string scene_to_json(const Scene & scene)
{
  const GridGeometry & g = scene.raster.grid;
  json j;
  j["version"] = kSceneFormatVersion;
  j["resolution"] = g.resolution;
  j["origin"] = {{"x", g.origin.x}, {"y", g.origin.y}};
  j["raster"] = {
    {"h", g.height},
    {"w", g.width},
    {"c", scene.raster.channels},
    {"data", detail::base64_encode(detail::floats_to_le_bytes(scene.raster.data))}};
  j["mask"] = {{"data", detail::base64_encode(pack_bits(scene.mask.cells))}};
  json tracks = json::array();
  for (const auto & t : scene.tracks) {
    tracks.push_back(
      {{"id", t.id}, {"past", trajectory_to_json(t.past)}, {"future", trajectory_to_json(t.future)}});
  }
  j["tracks"] = std::move(tracks);
  return j.dump(1) + "\n";
}

Scene scene_from_json(const std::string & text, const SceneShape & shape)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error & e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw FormatError("scene: JSON parse error at line " + std::to_string(line) + ": " + e.what());
  }
  const json & version = field(j, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kSceneFormatVersion) {
    throw FormatError(
      "scene: unsupported version " + version.dump() + ", expected " +
      std::to_string(kSceneFormatVersion));
  }
  Scene scene;
  GridGeometry & g = scene.raster.grid;
  g.resolution = number(field(j, "resolution", ""), "resolution");
  const json & origin = field(j, "origin", "");
  g.origin = Pose{number(field(origin, "x", "origin"), "origin.x"),
                  number(field(origin, "y", "origin"), "origin.y")};
  const json & raster = field(j, "raster", "");
  g.height = count(field(raster, "h", "raster"), "raster.h");
  g.width = count(field(raster, "w", "raster"), "raster.w");
  scene.raster.channels = count(field(raster, "c", "raster"), "raster.c");
  const json & rdata = field(raster, "data", "raster");
  if (!rdata.is_string()) {
    throw FormatError("scene: field 'raster.data' must be a base64 string");
  }
  try {
    scene.raster.data = detail::le_bytes_to_floats(detail::base64_decode(rdata.get<std::string>()));
  } catch (const FormatError & e) {
    throw FormatError(std::string("scene: field 'raster.data': ") + e.what());
  }
  if (scene.raster.data.size() != g.cells() * scene.raster.channels) {
    throw FormatError(
      "scene: field 'raster.data' holds " + std::to_string(scene.raster.data.size()) +
      " floats, expected h*w*c = " + std::to_string(g.cells() * scene.raster.channels));
  }
  const json & mdata = field(field(j, "mask", ""), "data", "mask");
  if (!mdata.is_string()) {
    throw FormatError("scene: field 'mask.data' must be a base64 string");
  }
  std::vector<std::uint8_t> bits;
  try {
    bits = detail::base64_decode(mdata.get<std::string>());
  } catch (const FormatError & e) {
    throw FormatError(std::string("scene: field 'mask.data': ") + e.what());
  }
  if (bits.size() != (g.cells() + 7) / 8) {
    throw FormatError(
      "scene: field 'mask.data' holds " + std::to_string(bits.size()) + " bytes, expected " +
      std::to_string((g.cells() + 7) / 8));
  }
  scene.mask.grid = g;
  scene.mask.cells.resize(g.cells());
  for (std::size_t i = 0; i < g.cells(); ++i) {
    scene.mask.cells[i] = (bits[i / 8] >> (7 - i % 8)) & 1u;
  }
  const json & tracks = field(j, "tracks", "");
  if (!tracks.is_array()) {
    throw FormatError("scene: field 'tracks' must be an array");
  }
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const std::string at = "tracks[" + std::to_string(i) + "]";
    const json & t = tracks[i];
    AgentTrack track;
    const json & id = field(t, "id", at);
    if (!id.is_string()) {
      throw FormatError("scene: field '" + at + ".id' must be a string");
    }
    track.id = id.get<std::string>();
    track.past = trajectory_from_json(field(t, "past", at), at + ".past");
    track.future = trajectory_from_json(field(t, "future", at), at + ".future");
    scene.tracks.push_back(std::move(track));
  }
  if (g.cells() == 0) {
    throw FormatError("scene: raster must have nonzero height and width");
  }
  if (scene.mask.drivable_count() == 0) {
    throw FormatError("scene: mask has no drivable cell");
  }
  const double eps = std::min(kDefaultPriorFloor, 0.5 / static_cast<double>(g.cells()));
  scene.prior = build_prior(scene.mask, eps);
  validate_scene(scene, shape);
  return scene;
}

void save_scene(const Scene & scene, const std::filesystem::path & path)
{
  detail::write_text_file(path, scene_to_json(scene));
}

Scene load_scene(const std::filesystem::path & path, const SceneShape & shape)
{
  try {
    return scene_from_json(detail::read_text_file(path), shape);
  } catch (const FormatError & e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_dataset(const std::filesystem::path & dir, const std::vector<Scene> & scenes)
{
  std::filesystem::create_directories(dir);
  json index;
  index["version"] = kSceneFormatVersion;
  json names = json::array();
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04zu.json", i);
    save_scene(scenes[i], dir / name);
    names.push_back(name);
  }
  index["scenes"] = std::move(names);
  detail::write_text_file(dir / kDatasetIndexName, index.dump(1) + "\n");
}

Dataset load_dataset(const std::filesystem::path & dir, const SceneShape & shape)
{
  json index;
  try {
    index = json::parse(detail::read_text_file(dir / kDatasetIndexName));
  } catch (const json::parse_error & e) {
    throw FormatError((dir / kDatasetIndexName).string() + ": " + e.what());
  }
  if (!index.is_object() || !index.contains("scenes") || !index["scenes"].is_array()) {
    throw FormatError((dir / kDatasetIndexName).string() + ": missing 'scenes' array");
  }
  Dataset ds;
  for (const auto & entry : index["scenes"]) {
    if (!entry.is_string()) {
      throw FormatError((dir / kDatasetIndexName).string() + ": scene entries must be strings");
    }
    ds.names.push_back(entry.get<std::string>());
    ds.scenes.push_back(load_scene(dir / ds.names.back(), shape));
  }
  return ds;
}

}  // namespace trajformer
