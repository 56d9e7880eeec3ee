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

#include "gauntlet/harness/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gauntlet/attacks/attack.hpp"
#include "gauntlet/errors.hpp"
#include "gauntlet/models/checkpoint.hpp"

namespace gauntlet::harness {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

attacks::AttackConfig untargeted_config(const RunManifest& manifest,
                                        long image_index) {
  attacks::AttackConfig cfg = manifest.attack;
  cfg.targeted = false;
  cfg.target.reset();
  cfg.route = attacks::GradientRoute::kAuto;
  cfg.seed = image_stream_seed(manifest.seed, image_index, kStreamUntargeted);
  return cfg;
}

AttackOutcome judge_untargeted(const models::Classifier& classifier,
                               const defenses::DefensePipeline& defense,
                               const attacks::AdversarialExample& example,
                               int y, long image_index,
                               const RunManifest& manifest) {
  const int trials = effective_trials(defense, manifest.trials);
  Rng rng(image_stream_seed(manifest.seed, image_index, kStreamVotes));
  AttackOutcome out;
  out.linf = example.linf;
  out.trials = trials;
  out.votes = defended_votes(classifier, defense, example.adversarial, y,
                             trials, rng);
  out.correct = out.votes >= majority_threshold(trials);
  return out;
}

}  // namespace

void verify_budget(const Tensor& x, const Tensor& x_adv, double epsilon) {
  if (x.shape() != x_adv.shape()) {
    throw DimensionError("verify_budget: shape mismatch between " +
                         shape_string(x.shape()) + " and " +
                         shape_string(x_adv.shape()));
  }
  const double slack = epsilon + 1e-12;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x_adv.data()[i];
    const double d = a - x.data()[i];
    if (!(std::abs(d) <= slack)) {
      throw ContractError("verify_budget: |delta| = " + std::to_string(d) +
                          " exceeds epsilon " + std::to_string(epsilon) +
                          " at element " + std::to_string(i));
    }
    if (!(a >= 0.0 && a <= 1.0)) {
      throw ContractError("verify_budget: value " + std::to_string(a) +
                          " outside [0,1] at element " + std::to_string(i));
    }
  }
}

AttackOutcome oblivious_outcome(const models::Classifier& classifier,
                                const defenses::DefensePipeline& defense,
                                const Tensor& x, int y, long image_index,
                                const RunManifest& manifest) {
  const attacks::AttackConfig cfg = untargeted_config(manifest, image_index);
  defenses::IdentityDefense bare;
  const attacks::AdversarialExample example =
      attacks::pgd(classifier, bare, x, y, cfg);
  verify_budget(x, example.adversarial, cfg.epsilon);
  return judge_untargeted(classifier, defense, example, y, image_index,
                          manifest);
}

AttackOutcome whitebox_outcome(const models::Classifier& classifier,
                               const defenses::DefensePipeline& defense,
                               const Tensor& x, int y, long image_index,
                               const RunManifest& manifest) {
  const attacks::AttackConfig cfg = untargeted_config(manifest, image_index);
  const attacks::AdversarialExample example =
      attacks::pgd(classifier, defense, x, y, cfg);
  verify_budget(x, example.adversarial, cfg.epsilon);
  return judge_untargeted(classifier, defense, example, y, image_index,
                          manifest);
}

TargetedOutcome targeted_outcome(const models::Classifier& classifier,
                                 const defenses::DefensePipeline& defense,
                                 const Tensor& x, int y, long image_index,
                                 const RunManifest& manifest) {
  const std::size_t classes = classifier.classes();
  if (classes < 2) {
    throw ConfigError("suite: targeted attacks need at least 2 classes");
  }
  Rng choice(
      image_stream_seed(manifest.seed, image_index, kStreamTargetChoice));
  std::size_t pick = choice.uniform_index(classes - 1);
  const int target =
      static_cast<int>(pick < static_cast<std::size_t>(y) ? pick : pick + 1);

  attacks::AttackConfig cfg = manifest.attack;
  cfg.targeted = true;
  cfg.target = target;
  cfg.route = attacks::GradientRoute::kAuto;
  cfg.seed = image_stream_seed(manifest.seed, image_index, kStreamTargeted);
  const attacks::AdversarialExample example =
      attacks::pgd(classifier, defense, x, y, cfg);
  verify_budget(x, example.adversarial, cfg.epsilon);

  Rng votes(image_stream_seed(manifest.seed, image_index, kStreamVotes));
  const attacks::SuccessResult result =
      attacks::attack_success(classifier, defense, example.adversarial, y,
                              target, manifest.trials, manifest.threshold,
                              votes);
  TargetedOutcome out;
  out.target = target;
  out.linf = example.linf;
  out.votes = result.votes;
  out.trials = manifest.trials;
  out.success = result.success;
  return out;
}

PerImageRecord evaluate_image(const models::Classifier& classifier,
                              const defenses::DefensePipeline& defense,
                              const Tensor& x, int y, long image_index,
                              const RunManifest& manifest) {
  PerImageRecord record;
  record.index = image_index;
  record.label = y;
  record.clean_prediction = classifier.classify(x);

  record.clean_trials = effective_trials(defense, manifest.trials);
  Rng votes(image_stream_seed(manifest.seed, image_index, kStreamVotes));
  record.clean_votes = defended_votes(classifier, defense, x, y,
                                      record.clean_trials, votes);
  record.clean_defended_correct =
      record.clean_votes >= majority_threshold(record.clean_trials);

  if (manifest.run_oblivious) {
    record.oblivious =
        oblivious_outcome(classifier, defense, x, y, image_index, manifest);
  }
  record.whitebox =
      whitebox_outcome(classifier, defense, x, y, image_index, manifest);
  if (manifest.run_targeted) {
    record.targeted =
        targeted_outcome(classifier, defense, x, y, image_index, manifest);
  }
  return record;
}

ObliviousRunResult run_oblivious_attack(const models::Classifier& classifier,
                                        const defenses::DefensePipeline& defense,
                                        const Dataset& dataset,
                                        const RunManifest& manifest) {
  if (dataset.size() == 0) {
    throw InputError("suite: dataset is empty");
  }
  ObliviousRunResult result;
  long correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    AttackOutcome outcome =
        oblivious_outcome(classifier, defense, dataset.images[i],
                          dataset.labels[i], static_cast<long>(i), manifest);
    correct += outcome.correct ? 1 : 0;
    result.outcomes.push_back(std::move(outcome));
  }
  result.accuracy =
      static_cast<double>(correct) / static_cast<double>(dataset.size());
  return result;
}

EvalReport run_whitebox_suite(const RunManifest& manifest) {
  if (manifest.test_images.empty() || manifest.test_labels.empty()) {
    throw ConfigError("suite: manifest needs datasets.test_images and "
                      "datasets.test_labels");
  }
  if (manifest.classifier_checkpoint.empty()) {
    throw ConfigError("suite: manifest needs checkpoints.classifier");
  }
  Dataset test = load_idx(manifest.test_images, manifest.test_labels, "test");
  if (manifest.max_images > 0) test.truncate(manifest.max_images);
  const models::Classifier classifier =
      models::load_classifier(manifest.classifier_checkpoint);
  const auto defense = build_defense(manifest);
  return run_whitebox_suite(manifest, classifier, *defense, test);
}

EvalReport run_whitebox_suite(const RunManifest& manifest,
                              const models::Classifier& classifier,
                              const defenses::DefensePipeline& defense,
                              const Dataset& test) {
  const std::size_t n = test.size();
  if (n == 0) throw InputError("suite: dataset is empty");
  if (manifest.trials < 1) throw ConfigError("suite: trials must be >= 1");
  if (manifest.threshold < 1 || manifest.threshold > manifest.trials) {
    throw ConfigError("suite: threshold must be in [1, trials]");
  }
  manifest.attack.validate();

  std::vector<PerImageRecord> records(n);
  std::vector<double> image_ms(n, 0.0);
  std::vector<char> done(n, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto started = Clock::now();
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || stop.load()) break;
      try {
        const auto item_started = Clock::now();
        records[i] =
            evaluate_image(classifier, defense, test.images[i],
                           test.labels[i], static_cast<long>(i), manifest);
        image_ms[i] = ms_since(item_started);
        done[i] = 1;
      } catch (...) {
        {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
        stop.store(true);
        break;
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max<std::size_t>(manifest.workers, 1), n);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  EvalReport report;
  report.version = kReportVersion;
  report.manifest_json = manifest_to_json(manifest);
  for (std::size_t i = 0; i < n; ++i) {
    if (!done[i]) continue;
    report.per_image.push_back(records[i]);
    report.timing.per_image_ms.push_back(image_ms[i]);
  }
  report.timing.wall_ms = ms_since(started);

  if (first_error) {
    report.complete = false;
    if (!report.per_image.empty()) {
      report.aggregates = recompute_aggregates(report.per_image);
      if (!manifest.output.empty()) {
        try {
          save_report(report, manifest.output);
        } catch (...) {
          // The partial dump is best effort; the original error wins.
        }
      }
    }
    std::rethrow_exception(first_error);
  }

  report.complete = true;
  report.aggregates = recompute_aggregates(report.per_image);
  if (!manifest.output.empty()) save_report(report, manifest.output);
  return report;
}

}  // namespace gauntlet::harness
