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

#ifndef TRAJFORMER__RNG_HPP_
#define TRAJFORMER__RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace trajformer
{

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/**
 * @brief Independent generator for a named substream of a master seed.
 *
 * substream(seed, "init") and substream(seed, "mc", {step, i}) never share
 * state, so adding draws to one consumer does not shift any other.
 */
inline Rng substream(
  std::uint64_t master, std::string_view name, std::initializer_list<std::uint64_t> index = {})
{
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
  for (char c : name) {
    h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  }
  std::uint64_t s = splitmix64(master ^ splitmix64(h));
  for (std::uint64_t i : index) {
    s = splitmix64(s ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  }
  return Rng(s);
}

}  // namespace trajformer

#endif  // TRAJFORMER__RNG_HPP_
