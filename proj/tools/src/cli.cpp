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

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gauntlet/errors.hpp"
#include "gauntlet/harness/digits.hpp"
#include "gauntlet/harness/evaluate.hpp"
#include "gauntlet/harness/manifest.hpp"
#include "gauntlet/harness/report.hpp"
#include "gauntlet/harness/suite.hpp"
#include "gauntlet/models/checkpoint.hpp"
#include "gauntlet/models/train.hpp"
#include "gauntlet/version.hpp"

namespace gauntlet::cli {
namespace {

using harness::RunManifest;

struct Overrides {
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<int> iterations;
  std::optional<int> gradient_samples;
  std::optional<std::string> defense;
  std::optional<int> trials;
  std::optional<int> threshold;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_images;
  std::optional<std::size_t> workers;
  std::optional<double> learning_rate;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<std::string> out;
  bool targeted = false;
  bool no_targeted = false;
  bool oblivious = false;
  bool no_oblivious = false;
};

void add_override_flags(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--epsilon", o->epsilon, "Attack budget (linf)");
  cmd->add_option("--alpha", o->alpha, "Attack step size");
  cmd->add_option("--iterations", o->iterations, "Attack iterations");
  cmd->add_option("--gradient-samples", o->gradient_samples,
                  "Defense-randomness samples per gradient (BPDA)");
  cmd->add_option("--defense", o->defense,
                  "Defense: none | pixel-deflection | guided-denoiser");
  cmd->add_option("--trials", o->trials, "Defended votes per image");
  cmd->add_option("--threshold", o->threshold,
                  "Votes required for targeted success");
  cmd->add_option("--seed", o->seed, "Master seed override");
  cmd->add_option("--max-images", o->max_images, "Cap on test images");
  cmd->add_option("--workers", o->workers, "Worker threads");
  cmd->add_option("--learning-rate", o->learning_rate, "Training step size");
  cmd->add_option("--epochs", o->epochs, "Training epochs");
  cmd->add_option("--batch-size", o->batch_size, "Training batch size");
  cmd->add_option("--out", o->out, "Output path override");
  cmd->add_flag("--targeted", o->targeted, "Run the targeted phase");
  cmd->add_flag("--no-targeted", o->no_targeted, "Skip the targeted phase");
  cmd->add_flag("--oblivious", o->oblivious, "Run the oblivious phase");
  cmd->add_flag("--no-oblivious", o->no_oblivious,
                "Skip the oblivious phase");
}

void apply_overrides(RunManifest* m, const Overrides& o) {
  if (o.epsilon) m->attack.epsilon = *o.epsilon;
  if (o.alpha) m->attack.alpha = *o.alpha;
  if (o.iterations) m->attack.iterations = *o.iterations;
  if (o.gradient_samples) m->attack.gradient_samples = *o.gradient_samples;
  if (o.defense) m->defense.kind = harness::defense_kind_from_name(*o.defense);
  if (o.trials) m->trials = *o.trials;
  if (o.threshold) m->threshold = *o.threshold;
  if (o.seed) m->seed = *o.seed;
  if (o.max_images) m->max_images = *o.max_images;
  if (o.workers) m->workers = *o.workers;
  if (o.learning_rate) m->train.learning_rate = *o.learning_rate;
  if (o.epochs) m->train.epochs = *o.epochs;
  if (o.batch_size) m->train.batch_size = *o.batch_size;
  if (o.targeted) m->run_targeted = true;
  if (o.no_targeted) m->run_targeted = false;
  if (o.oblivious) m->run_oblivious = true;
  if (o.no_oblivious) m->run_oblivious = false;
}

void require_file(const std::string& path, const char* field) {
  if (path.empty()) {
    throw ConfigError(std::string("manifest: ") + field + " is not set");
  }
  if (!std::filesystem::exists(path)) {
    throw ConfigError(std::string("manifest: ") + field + ": file not found: " +
                      path);
  }
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  return buf;
}

models::InputSpec input_spec_of(const harness::Dataset& dataset) {
  const Shape& s = dataset.images.front().shape();
  return models::InputSpec{s[0], s[1], s[2]};
}

std::size_t class_count(const harness::Dataset& dataset) {
  int top = 0;
  for (int label : dataset.labels) top = std::max(top, label);
  return static_cast<std::size_t>(top) + 1;
}

int cmd_make_dataset(std::size_t count, std::uint64_t seed,
                     const std::string& split, const std::string& images_path,
                     const std::string& labels_path) {
  harness::Dataset dataset = harness::make_digit_dataset(count, seed, split);
  harness::save_idx(dataset, images_path, labels_path);
  std::printf("wrote %zu %zux%zu images to %s, labels to %s\n", dataset.size(),
              harness::kDigitImageSize, harness::kDigitImageSize,
              images_path.c_str(), labels_path.c_str());
  return 0;
}

int cmd_train_classifier(RunManifest manifest, const Overrides& o) {
  if (o.seed) manifest.train.seed = *o.seed;
  if (o.out) manifest.classifier_checkpoint = *o.out;
  require_file(manifest.train_images, "datasets.train_images");
  require_file(manifest.train_labels, "datasets.train_labels");
  if (manifest.classifier_checkpoint.empty()) {
    throw ConfigError("manifest: checkpoints.classifier is not set");
  }
  harness::Dataset train =
      harness::load_idx(manifest.train_images, manifest.train_labels, "train");
  if (train.size() == 0) throw InputError("training dataset is empty");
  const models::InputSpec input = input_spec_of(train);
  const std::size_t classes = class_count(train);

  models::ClassifierTrainResult result = models::train_classifier(
      input, models::desk_classifier_layers(input, classes), classes,
      train.images, train.labels, manifest.train);
  for (std::size_t e = 0; e < result.curve.size(); ++e) {
    std::printf("epoch %zu/%zu  loss %.4f  holdout accuracy %s\n", e + 1,
                result.curve.size(), result.curve[e].train_loss,
                percent(result.curve[e].holdout_accuracy).c_str());
  }
  models::save_checkpoint(manifest.classifier_checkpoint, result.checkpoint);
  std::printf("wrote %s\n", manifest.classifier_checkpoint.c_str());
  return 0;
}

int cmd_train_denoiser(RunManifest manifest, const Overrides& o) {
  if (o.seed) manifest.train.seed = *o.seed;
  if (o.out) manifest.denoiser_checkpoint = *o.out;
  require_file(manifest.train_images, "datasets.train_images");
  require_file(manifest.train_labels, "datasets.train_labels");
  require_file(manifest.classifier_checkpoint, "checkpoints.classifier");
  if (manifest.denoiser_checkpoint.empty()) {
    throw ConfigError("manifest: checkpoints.denoiser is not set");
  }
  harness::Dataset train =
      harness::load_idx(manifest.train_images, manifest.train_labels, "train");
  if (train.size() == 0) throw InputError("training dataset is empty");
  const models::Classifier classifier =
      models::load_classifier(manifest.classifier_checkpoint);
  const models::InputSpec input = input_spec_of(train);

  models::DenoiserTrainResult result = models::train_guided_denoiser(
      classifier, models::desk_denoiser_layers(input), train.images,
      train.labels, manifest.train);
  std::printf("untrained holdout guided loss %.4f\n",
              result.baseline_holdout_loss);
  for (std::size_t e = 0; e < result.curve.size(); ++e) {
    std::printf("epoch %zu/%zu  loss %.4f  holdout loss %.4f\n", e + 1,
                result.curve.size(), result.curve[e].train_loss,
                result.curve[e].holdout_loss);
  }
  models::save_checkpoint(manifest.denoiser_checkpoint, result.checkpoint);
  std::printf("wrote %s\n", manifest.denoiser_checkpoint.c_str());
  return 0;
}

void check_run_inputs(const RunManifest& manifest) {
  require_file(manifest.test_images, "datasets.test_images");
  require_file(manifest.test_labels, "datasets.test_labels");
  require_file(manifest.classifier_checkpoint, "checkpoints.classifier");
  if (manifest.defense.kind == harness::DefenseKind::kGuidedDenoiser) {
    require_file(manifest.denoiser_checkpoint, "checkpoints.denoiser");
  }
}

void print_aggregates(const harness::Aggregates& a) {
  std::printf("images                %ld\n", a.images);
  std::printf("clean accuracy        %s\n", percent(a.clean_accuracy).c_str());
  std::printf("defended clean        %s\n",
              percent(a.defended_clean_accuracy).c_str());
  if (a.oblivious_accuracy) {
    std::printf("oblivious accuracy    %s\n",
                percent(*a.oblivious_accuracy).c_str());
  }
  if (a.whitebox_accuracy) {
    std::printf("white-box accuracy    %s\n",
                percent(*a.whitebox_accuracy).c_str());
  }
  if (a.targeted_success_rate) {
    std::printf("targeted success      %s\n",
                percent(*a.targeted_success_rate).c_str());
  }
}

int cmd_attack(RunManifest manifest, const Overrides& o) {
  if (o.out) manifest.output = *o.out;
  check_run_inputs(manifest);
  harness::EvalReport report = harness::run_whitebox_suite(manifest);
  print_aggregates(report.aggregates);
  std::printf("wall time             %.1f s\n", report.timing.wall_ms / 1e3);
  if (!manifest.output.empty()) {
    std::printf("report                %s\n", manifest.output.c_str());
  }
  return 0;
}

int cmd_evaluate(RunManifest manifest, const Overrides& o) {
  if (o.out) manifest.output = *o.out;
  check_run_inputs(manifest);
  harness::Dataset test =
      harness::load_idx(manifest.test_images, manifest.test_labels, "test");
  if (manifest.max_images > 0) test.truncate(manifest.max_images);
  if (test.size() == 0) throw InputError("test dataset is empty");
  const models::Classifier classifier =
      models::load_classifier(manifest.classifier_checkpoint);
  const auto defense = harness::build_defense(manifest);

  const auto started = std::chrono::steady_clock::now();
  harness::EvalReport report;
  report.manifest_json = harness::manifest_to_json(manifest);
  for (std::size_t i = 0; i < test.size(); ++i) {
    harness::PerImageRecord rec;
    rec.index = static_cast<long>(i);
    rec.label = test.labels[i];
    rec.clean_prediction = classifier.classify(test.images[i]);
    rec.clean_trials = harness::effective_trials(*defense, manifest.trials);
    Rng rng(harness::image_stream_seed(manifest.seed, rec.index,
                                       harness::kStreamVotes));
    rec.clean_votes =
        harness::defended_votes(classifier, *defense, test.images[i],
                                rec.label, rec.clean_trials, rng);
    rec.clean_defended_correct =
        rec.clean_votes >= harness::majority_threshold(rec.clean_trials);
    report.per_image.push_back(std::move(rec));
  }
  report.aggregates = harness::recompute_aggregates(report.per_image);
  report.timing.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started)
                              .count();
  print_aggregates(report.aggregates);
  if (!manifest.output.empty()) {
    harness::save_report(report, manifest.output);
    std::printf("report                %s\n", manifest.output.c_str());
  }
  return 0;
}

bool aggregates_equal(const harness::Aggregates& a,
                      const harness::Aggregates& b) {
  return a.images == b.images && a.clean_accuracy == b.clean_accuracy &&
         a.defended_clean_accuracy == b.defended_clean_accuracy &&
         a.oblivious_accuracy == b.oblivious_accuracy &&
         a.whitebox_accuracy == b.whitebox_accuracy &&
         a.targeted_success_rate == b.targeted_success_rate;
}

int cmd_report(const std::string& report_path) {
  require_file(report_path, "report path");
  harness::EvalReport report = harness::load_report(report_path);
  const harness::Aggregates recomputed =
      harness::recompute_aggregates(report.per_image);
  if (!aggregates_equal(report.aggregates, recomputed)) {
    throw ConsistencyError(
        "report: stored aggregates do not match the per-image records");
  }
  print_aggregates(report.aggregates);
  std::printf("records               %zu\n", report.per_image.size());
  std::printf("complete              %s\n", report.complete ? "yes" : "no");
  std::printf("aggregates verified\n");
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"White-box adversarial evaluation gauntlet"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string manifest_path;
  Overrides overrides;

  // make-dataset is self-contained; everything else is manifest-driven.
  std::size_t gen_count = 2000;
  std::uint64_t gen_seed = 1;
  std::string gen_split;
  std::string gen_images;
  std::string gen_labels;
  CLI::App* make_dataset =
      app.add_subcommand("make-dataset", "Generate a synthetic digit dataset");
  make_dataset->add_option("--count", gen_count, "Number of images");
  make_dataset->add_option("--seed", gen_seed, "Dataset seed");
  make_dataset->add_option("--split", gen_split, "Split tag stored on load");
  make_dataset->add_option("--out-images", gen_images, "IDX image output path")
      ->required();
  make_dataset->add_option("--out-labels", gen_labels, "IDX label output path")
      ->required();

  auto* train_classifier = app.add_subcommand(
      "train-classifier", "Train the classifier named by the manifest");
  auto* train_denoiser = app.add_subcommand(
      "train-denoiser", "Train the guided denoiser against the classifier");
  auto* attack = app.add_subcommand(
      "attack", "Run the attack suite and write the evaluation report");
  auto* evaluate = app.add_subcommand(
      "evaluate", "Measure clean and defended accuracy (no attacks)");
  std::string report_path;
  auto* report = app.add_subcommand(
      "report", "Validate and summarize an existing report");
  report->add_option("--report", report_path, "Report JSON path");

  for (CLI::App* cmd :
       {train_classifier, train_denoiser, attack, evaluate, report}) {
    auto* opt = cmd->add_option("--manifest", manifest_path,
                                "Run manifest JSON path");
    if (cmd != report) opt->required();
    add_override_flags(cmd, &overrides);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*make_dataset) {
      return cmd_make_dataset(gen_count, gen_seed, gen_split, gen_images,
                              gen_labels);
    }
    if (*report) {
      if (report_path.empty()) {
        if (manifest_path.empty()) {
          throw ConfigError("report: pass --report or a manifest with an "
                            "output path");
        }
        RunManifest manifest = harness::load_manifest(manifest_path);
        apply_overrides(&manifest, overrides);
        if (overrides.out) manifest.output = *overrides.out;
        report_path = manifest.output;
      }
      return cmd_report(report_path);
    }

    RunManifest manifest = harness::load_manifest(manifest_path);
    apply_overrides(&manifest, overrides);
    if (*train_classifier) return cmd_train_classifier(std::move(manifest), overrides);
    if (*train_denoiser) return cmd_train_denoiser(std::move(manifest), overrides);
    if (*attack) return cmd_attack(std::move(manifest), overrides);
    if (*evaluate) return cmd_evaluate(std::move(manifest), overrides);
    throw ConfigError("no subcommand selected");
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "gauntlet: error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "gauntlet: error: %s\n", e.what());
    return 2;
  } catch (const ConsistencyError& e) {
    std::fprintf(stderr, "gauntlet: error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gauntlet: error: %s\n", e.what());
    return 1;
  }
}

}  // namespace gauntlet::cli
