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

#ifndef TRAJFORMER__BINARY_HPP_
#define TRAJFORMER__BINARY_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "trajformer/errors.hpp"

namespace trajformer::detail
{

inline std::vector<std::uint8_t> floats_to_le_bytes(std::span<const float> values)
{
  std::vector<std::uint8_t> out(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    out[4 * i + 0] = static_cast<std::uint8_t>(bits & 0xff);
    out[4 * i + 1] = static_cast<std::uint8_t>((bits >> 8) & 0xff);
    out[4 * i + 2] = static_cast<std::uint8_t>((bits >> 16) & 0xff);
    out[4 * i + 3] = static_cast<std::uint8_t>((bits >> 24) & 0xff);
  }
  return out;
}

inline std::vector<float> le_bytes_to_floats(std::span<const std::uint8_t> bytes)
{
  if (bytes.size() % 4 != 0) {
    throw FormatError("float payload length is not a multiple of 4 bytes");
  }
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint32_t bits = static_cast<std::uint32_t>(bytes[4 * i]) |
                               (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                               (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                               (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

inline std::string read_text_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::vector<std::uint8_t> read_binary_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return std::vector<std::uint8_t>(
    std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path & path, const void * data, std::size_t size)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out.write(static_cast<const char *>(data), static_cast<std::streamsize>(size));
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

inline void write_text_file(const std::filesystem::path & path, const std::string & text)
{
  write_file(path, text.data(), text.size());
}

}  // namespace trajformer::detail

#endif  // TRAJFORMER__BINARY_HPP_
