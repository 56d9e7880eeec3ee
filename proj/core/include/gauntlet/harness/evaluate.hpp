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
#include <vector>

#include "gauntlet/defenses/defense.hpp"
#include "gauntlet/harness/dataset.hpp"
#include "gauntlet/models/network.hpp"

namespace gauntlet::harness {

// Stream tags for per-image seed derivation. Attack-internal streams use the
// low tags (1, 2); the harness starts at 11 so the two layers can never
// collide.
inline constexpr std::uint64_t kStreamVotes = 11;
inline constexpr std::uint64_t kStreamUntargeted = 12;
inline constexpr std::uint64_t kStreamTargeted = 13;
inline constexpr std::uint64_t kStreamTargetChoice = 14;

// Seed for one image's rng stream. Every per-image draw in the harness goes
// through this, which is what makes results independent of worker count.
std::uint64_t image_stream_seed(std::uint64_t master_seed, long image_index,
                                std::uint64_t stream);

// For randomized defenses an image needs `trials` votes; a deterministic
// defense would cast the same vote every time, so one suffices.
int effective_trials(const defenses::DefensePipeline& defense, int trials);

// Number of votes (out of `trials`) equal to `wanted` when classifying
// defense(x) with fresh defense randomness per trial.
int defended_votes(const models::Classifier& classifier,
                   const defenses::DefensePipeline& defense, const Tensor& x,
                   int wanted, int trials, Rng& rng);

// Majority threshold: an image is correct iff votes >= ceil(trials / 2).
int majority_threshold(int trials);

struct AccuracyResult {
  double accuracy = 0.0;
  int trials = 1;               // effective trials actually voted
  std::vector<int> votes;       // per image, votes for the true label
  std::vector<bool> correct;    // per image, majority verdict
};

// Majority-vote accuracy of the (optionally defended) classifier over the
// dataset. Pass defense = nullptr for the bare classifier. Per-image vote
// randomness comes from (seed, image index, kStreamVotes). Throws InputError
// on an empty dataset.
AccuracyResult evaluate_accuracy(const models::Classifier& classifier,
                                 const defenses::DefensePipeline* defense,
                                 const Dataset& dataset, int trials,
                                 std::uint64_t seed);

}  // namespace gauntlet::harness
