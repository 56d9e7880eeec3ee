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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gauntlet {

/// SplitMix64 finalizer; used for seed mixing and derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a sequence of values into one well-mixed seed. Used to derive
/// independent per-image / per-purpose streams from a master seed, so
/// results do not depend on worker scheduling.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Deterministic random source.
///
/// All sampling goes through hand-rolled conversions rather than
/// std::*_distribution so that identical seeds produce identical streams on
/// every standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Uniform index in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Uniform integer in [lo, hi] inclusive.
  long uniform_int(long lo, long hi);

  /// Fresh generator for an independent labelled stream.
  Rng derive(std::uint64_t stream) {
    return Rng(derive_seed({next(), stream}));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gauntlet
