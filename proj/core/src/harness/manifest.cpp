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

#include "gauntlet/harness/manifest.hpp"

#include <fstream>
#include <initializer_list>
#include <iterator>

#include "gauntlet/defenses/guided_denoiser.hpp"
#include "gauntlet/errors.hpp"
#include "gauntlet/models/checkpoint.hpp"
#include "json.hpp"

namespace gauntlet::harness {
namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& j,
                std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) {
    throw FormatError(std::string("manifest: '") + where +
                      "' must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw FormatError(std::string("manifest: unknown key '") + key +
                        "' in " + where);
    }
  }
}

template <typename T>
void read_to(const ordered_json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

template <typename T>
void read_optional(const ordered_json& j, const char* key,
                   std::optional<T>* out) {
  if (j.contains(key) && !j.at(key).is_null()) {
    *out = j.at(key).get<T>();
  }
}

void parse_defense(const ordered_json& j, DefenseConfig* out) {
  check_keys(j,
             {"kind", "deflections", "deflection_fraction", "window_radius",
              "wavelet_levels"},
             "defense");
  if (j.contains("kind")) {
    out->kind = defense_kind_from_name(j.at("kind").get<std::string>());
  }
  read_optional(j, "deflections", &out->pixel_deflection.deflections);
  read_to(j, "deflection_fraction",
          &out->pixel_deflection.deflection_fraction);
  read_to(j, "window_radius", &out->pixel_deflection.window_radius);
  read_to(j, "wavelet_levels", &out->pixel_deflection.wavelet_levels);
}

void parse_attack(const ordered_json& j, attacks::AttackConfig* out) {
  check_keys(j,
             {"epsilon", "alpha", "iterations", "random_start",
              "gradient_samples"},
             "attack");
  read_to(j, "epsilon", &out->epsilon);
  read_optional(j, "alpha", &out->alpha);
  read_to(j, "iterations", &out->iterations);
  read_to(j, "random_start", &out->random_start);
  read_optional(j, "gradient_samples", &out->gradient_samples);
}

void parse_train(const ordered_json& j, models::TrainConfig* out) {
  check_keys(j,
             {"learning_rate", "batch_size", "epochs", "seed",
              "holdout_fraction", "noise"},
             "train");
  read_to(j, "learning_rate", &out->learning_rate);
  read_to(j, "batch_size", &out->batch_size);
  read_to(j, "epochs", &out->epochs);
  read_to(j, "seed", &out->seed);
  read_to(j, "holdout_fraction", &out->holdout_fraction);
  if (j.contains("noise")) {
    const ordered_json& n = j.at("noise");
    check_keys(n, {"magnitude", "pgd_fraction", "pgd_iterations"},
               "train.noise");
    read_to(n, "magnitude", &out->noise.magnitude);
    read_to(n, "pgd_fraction", &out->noise.pgd_fraction);
    read_to(n, "pgd_iterations", &out->noise.pgd_iterations);
  }
}

}  // namespace

std::string defense_kind_name(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::kNone:
      return "none";
    case DefenseKind::kPixelDeflection:
      return "pixel-deflection";
    case DefenseKind::kGuidedDenoiser:
      return "guided-denoiser";
  }
  throw ConfigError("manifest: unhandled defense kind");
}

DefenseKind defense_kind_from_name(const std::string& name) {
  if (name == "none") return DefenseKind::kNone;
  if (name == "pixel-deflection") return DefenseKind::kPixelDeflection;
  if (name == "guided-denoiser") return DefenseKind::kGuidedDenoiser;
  throw ConfigError("manifest: unknown defense '" + name +
                    "'; expected none, pixel-deflection, or guided-denoiser");
}

RunManifest manifest_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw FormatError(std::string("manifest: invalid JSON: ") + e.what());
  }
  check_keys(j,
             {"datasets", "checkpoints", "defense", "attack", "trials",
              "threshold", "seed", "max_images", "workers", "run_oblivious",
              "run_targeted", "train", "output"},
             "manifest");

  RunManifest m;
  try {
    if (j.contains("datasets")) {
      const ordered_json& d = j.at("datasets");
      check_keys(d,
                 {"train_images", "train_labels", "test_images",
                  "test_labels"},
                 "datasets");
      read_to(d, "train_images", &m.train_images);
      read_to(d, "train_labels", &m.train_labels);
      read_to(d, "test_images", &m.test_images);
      read_to(d, "test_labels", &m.test_labels);
    }
    if (j.contains("checkpoints")) {
      const ordered_json& c = j.at("checkpoints");
      check_keys(c, {"classifier", "denoiser"}, "checkpoints");
      read_to(c, "classifier", &m.classifier_checkpoint);
      read_to(c, "denoiser", &m.denoiser_checkpoint);
    }
    if (j.contains("defense")) parse_defense(j.at("defense"), &m.defense);
    if (j.contains("attack")) parse_attack(j.at("attack"), &m.attack);
    read_to(j, "trials", &m.trials);
    read_to(j, "threshold", &m.threshold);
    read_to(j, "seed", &m.seed);
    read_to(j, "max_images", &m.max_images);
    read_to(j, "workers", &m.workers);
    read_to(j, "run_oblivious", &m.run_oblivious);
    read_to(j, "run_targeted", &m.run_targeted);
    if (j.contains("train")) parse_train(j.at("train"), &m.train);
    read_to(j, "output", &m.output);
  } catch (const ordered_json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("manifest: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("manifest: read from '" + path + "' failed");
  return manifest_from_json(text);
}

std::string manifest_to_json(const RunManifest& m) {
  ordered_json j;
  j["datasets"] = {{"train_images", m.train_images},
                   {"train_labels", m.train_labels},
                   {"test_images", m.test_images},
                   {"test_labels", m.test_labels}};
  j["checkpoints"] = {{"classifier", m.classifier_checkpoint},
                      {"denoiser", m.denoiser_checkpoint}};
  ordered_json defense;
  defense["kind"] = defense_kind_name(m.defense.kind);
  if (m.defense.pixel_deflection.deflections) {
    defense["deflections"] = *m.defense.pixel_deflection.deflections;
  } else {
    defense["deflections"] = nullptr;
  }
  defense["deflection_fraction"] = m.defense.pixel_deflection.deflection_fraction;
  defense["window_radius"] = m.defense.pixel_deflection.window_radius;
  defense["wavelet_levels"] = m.defense.pixel_deflection.wavelet_levels;
  j["defense"] = std::move(defense);

  ordered_json attack;
  attack["epsilon"] = m.attack.epsilon;
  if (m.attack.alpha) {
    attack["alpha"] = *m.attack.alpha;
  } else {
    attack["alpha"] = nullptr;
  }
  attack["iterations"] = m.attack.iterations;
  attack["random_start"] = m.attack.random_start;
  if (m.attack.gradient_samples) {
    attack["gradient_samples"] = *m.attack.gradient_samples;
  } else {
    attack["gradient_samples"] = nullptr;
  }
  j["attack"] = std::move(attack);

  j["trials"] = m.trials;
  j["threshold"] = m.threshold;
  j["seed"] = m.seed;
  j["max_images"] = m.max_images;
  j["workers"] = m.workers;
  j["run_oblivious"] = m.run_oblivious;
  j["run_targeted"] = m.run_targeted;

  ordered_json train;
  train["learning_rate"] = m.train.learning_rate;
  train["batch_size"] = m.train.batch_size;
  train["epochs"] = m.train.epochs;
  train["seed"] = m.train.seed;
  train["holdout_fraction"] = m.train.holdout_fraction;
  train["noise"] = {{"magnitude", m.train.noise.magnitude},
                    {"pgd_fraction", m.train.noise.pgd_fraction},
                    {"pgd_iterations", m.train.noise.pgd_iterations}};
  j["train"] = std::move(train);

  j["output"] = m.output;
  return j.dump(2);
}

std::unique_ptr<defenses::DefensePipeline> build_defense(
    const RunManifest& manifest) {
  switch (manifest.defense.kind) {
    case DefenseKind::kNone:
      return std::make_unique<defenses::IdentityDefense>();
    case DefenseKind::kPixelDeflection:
      return std::make_unique<defenses::PixelDeflectionDefense>(
          manifest.defense.pixel_deflection);
    case DefenseKind::kGuidedDenoiser: {
      if (manifest.denoiser_checkpoint.empty()) {
        throw ConfigError(
            "manifest: guided-denoiser defense needs checkpoints.denoiser");
      }
      auto denoiser = std::make_shared<const models::Denoiser>(
          models::load_denoiser(manifest.denoiser_checkpoint));
      return std::make_unique<defenses::GuidedDenoiserDefense>(
          std::move(denoiser));
    }
  }
  throw ConfigError("manifest: unhandled defense kind");
}

}  // namespace gauntlet::harness
