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
#include <memory>
#include <string>

#include "gauntlet/attacks/attack.hpp"
#include "gauntlet/defenses/defense.hpp"
#include "gauntlet/defenses/pixel_deflection.hpp"
#include "gauntlet/models/network.hpp"
#include "gauntlet/models/train.hpp"

namespace gauntlet::harness {

enum class DefenseKind { kNone, kPixelDeflection, kGuidedDenoiser };

std::string defense_kind_name(DefenseKind kind);
DefenseKind defense_kind_from_name(const std::string& name);

struct DefenseConfig {
  DefenseKind kind = DefenseKind::kNone;
  defenses::PixelDeflectionConfig pixel_deflection;
};

/// Everything a run needs, loadable from JSON. Unknown keys are rejected so
/// typos fail loudly. Every field has a default; a manifest file only has
/// to override what it cares about, and CLI flags override the file.
struct RunManifest {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::string classifier_checkpoint;
  std::string denoiser_checkpoint;
  DefenseConfig defense;
  attacks::AttackConfig attack;
  int trials = 10;
  int threshold = 9;
  std::uint64_t seed = 0;
  std::size_t max_images = 200;
  std::size_t workers = 1;
  bool run_oblivious = true;
  bool run_targeted = true;
  models::TrainConfig train;
  std::string output;
};

/// Parses manifest JSON. Raises FormatError on malformed JSON or unknown
/// keys and ConfigError on invalid values.
RunManifest manifest_from_json(const std::string& text);
RunManifest load_manifest(const std::string& path);

/// Canonical JSON for the manifest: every field, fixed order, so the copy
/// embedded in a report is deterministic and reflects the effective run
/// configuration after flag overrides.
std::string manifest_to_json(const RunManifest& manifest);

/// Instantiates the configured defense; guided-denoiser loads its
/// checkpoint.
std::unique_ptr<defenses::DefensePipeline> build_defense(
    const RunManifest& manifest);

}  // namespace gauntlet::harness
