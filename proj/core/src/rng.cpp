// Copyright 2026 The Gauntlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gauntlet/rng.hpp"

#include "gauntlet/errors.hpp"

namespace gauntlet {

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x853c49e6748fea9bULL;
  for (std::uint64_t p : parts) {
    h = splitmix64(h ^ p);
  }
  return h;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw ConfigError("rng: uniform_index over empty range");
  // Lemire multiply-shift; bias below 2^-64 * n, irrelevant at this scale.
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(next()) * n) >> 64);
}

long Rng::uniform_int(long lo, long hi) {
  if (hi < lo) throw ConfigError("rng: uniform_int with hi < lo");
  std::size_t span = static_cast<std::size_t>(hi - lo) + 1;
  return lo + static_cast<long>(uniform_index(span));
}

}  // namespace gauntlet
