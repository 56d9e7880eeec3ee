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

#include "gauntlet/models/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "gauntlet/attacks/attack.hpp"
#include "gauntlet/defenses/defense.hpp"
#include "gauntlet/errors.hpp"
#include "gauntlet/tape.hpp"
#include "json.hpp"

namespace gauntlet::models {
namespace {

using nlohmann::ordered_json;

void check_examples(const InputSpec& input, std::size_t classes,
                    const std::vector<Tensor>& images,
                    const std::vector<int>& labels) {
  if (images.empty()) throw InputError("train: dataset is empty");
  if (images.size() != labels.size()) {
    throw ConsistencyError("train: " + std::to_string(images.size()) +
                           " images but " + std::to_string(labels.size()) +
                           " labels");
  }
  const Shape want = input.shape();
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].shape() != want) {
      throw DimensionError("train: image " + std::to_string(i) + " has shape " +
                           shape_string(images[i].shape()) + ", expected " +
                           shape_string(want));
    }
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
      throw IndexError("train: label " + std::to_string(labels[i]) +
                       " of image " + std::to_string(i) +
                       " out of range for " + std::to_string(classes) +
                       " classes");
    }
  }
}

void fisher_yates(std::vector<std::size_t>& indices, Rng& rng) {
  for (std::size_t i = indices.size(); i-- > 1;) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(indices[i], indices[j]);
  }
}

// Splits [0, n) into training indices and a held-out tail.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_holdout(
    std::size_t n, double fraction) {
  const std::size_t holdout =
      static_cast<std::size_t>(fraction * static_cast<double>(n));
  std::vector<std::size_t> train(n - holdout);
  std::vector<std::size_t> held(holdout);
  std::iota(train.begin(), train.end(), std::size_t{0});
  std::iota(held.begin(), held.end(), n - holdout);
  return {std::move(train), std::move(held)};
}

void apply_update(std::vector<Tensor*>& params,
                  const std::vector<Tensor>& grads, double step) {
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    for (std::size_t i = 0; i < t.size(); ++i) t[i] -= step * grads[p][i];
  }
}

ordered_json curve_entry(double a, const char* a_key, double b,
                         const char* b_key) {
  ordered_json j;
  j[a_key] = a;
  j[b_key] = b;
  return j;
}

Checkpoint with_training_metadata(Checkpoint ckpt, ordered_json training) {
  ordered_json meta = ordered_json::parse(ckpt.metadata);
  meta["training"] = std::move(training);
  ckpt.metadata = meta.dump();
  return ckpt;
}

}  // namespace

void TrainConfig::validate() const {
  if (learning_rate < 0.0) {
    throw ConfigError("train: learning rate must be >= 0, got " +
                      std::to_string(learning_rate));
  }
  if (batch_size < 1) throw ConfigError("train: batch size must be >= 1");
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) {
    throw ConfigError("train: holdout fraction must lie in [0,1), got " +
                      std::to_string(holdout_fraction));
  }
  if (noise.magnitude < 0.0 || noise.magnitude > 1.0) {
    throw ConfigError("train: noise magnitude must lie in [0,1], got " +
                      std::to_string(noise.magnitude));
  }
  if (noise.pgd_fraction < 0.0 || noise.pgd_fraction > 1.0) {
    throw ConfigError("train: PGD fraction must lie in [0,1], got " +
                      std::to_string(noise.pgd_fraction));
  }
  if (noise.pgd_iterations < 0) {
    throw ConfigError("train: PGD iteration count must be >= 0");
  }
}

ClassifierTrainResult train_classifier(const InputSpec& input,
                                       const std::vector<LayerSpec>& layers,
                                       std::size_t classes,
                                       const std::vector<Tensor>& images,
                                       const std::vector<int>& labels,
                                       const TrainConfig& config) {
  config.validate();
  check_examples(input, classes, images, labels);

  Rng rng(config.seed);
  ClassifierTrainResult result{Classifier(Network(input, layers), classes),
                               {},
                               {}};
  result.classifier.network().init_parameters(rng);

  auto [train_idx, held_idx] = split_holdout(images.size(),
                                             config.holdout_fraction);
  const std::vector<std::size_t>& eval_idx =
      held_idx.empty() ? train_idx : held_idx;

  std::vector<Tensor*> params = result.classifier.network().parameters();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    fisher_yates(train_idx, rng);
    double epoch_loss = 0.0;

    for (std::size_t begin = 0; begin < train_idx.size();
         begin += config.batch_size) {
      const std::size_t end =
          std::min(begin + config.batch_size, train_idx.size());
      std::vector<Tensor> acc;
      for (Tensor* p : params) acc.emplace_back(p->shape());

      try {
        for (std::size_t b = begin; b < end; ++b) {
          const std::size_t idx = train_idx[b];
          Tape tape;
          std::vector<Var> pvars;
          Var xv = tape.leaf(images[idx]);
          Var logits = result.classifier.forward(tape, xv, &pvars);
          Var loss = tape.softmax_cross_entropy(logits, labels[idx]);
          epoch_loss += tape.value(loss)[0];
          const Gradients grads = tape.backward(loss);
          for (std::size_t p = 0; p < pvars.size(); ++p) {
            const Tensor& g = grads.grad(pvars[p]);
            for (std::size_t i = 0; i < g.size(); ++i) acc[p][i] += g[i];
          }
        }
      } catch (const NumericError& e) {
        throw TrainingError("classifier training diverged at epoch " +
                            std::to_string(epoch) + ": " + e.what());
      }

      apply_update(params, acc,
                   config.learning_rate / static_cast<double>(end - begin));
    }

    epoch_loss /= static_cast<double>(train_idx.size());
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("classifier training diverged at epoch " +
                          std::to_string(epoch));
    }

    std::size_t correct = 0;
    for (std::size_t idx : eval_idx) {
      if (result.classifier.classify(images[idx]) == labels[idx]) ++correct;
    }
    result.curve.push_back(
        {epoch_loss,
         static_cast<double>(correct) / static_cast<double>(eval_idx.size())});
  }

  ordered_json training;
  training["seed"] = config.seed;
  training["epochs"] = config.epochs;
  training["learning_rate"] = config.learning_rate;
  training["batch_size"] = config.batch_size;
  training["holdout_fraction"] = config.holdout_fraction;
  training["final_train_loss"] =
      result.curve.empty() ? 0.0 : result.curve.back().train_loss;
  training["final_holdout_accuracy"] =
      result.curve.empty() ? 0.0 : result.curve.back().holdout_accuracy;
  ordered_json curve = ordered_json::array();
  for (const ClassifierEpoch& e : result.curve) {
    curve.push_back(curve_entry(e.train_loss, "train_loss",
                                e.holdout_accuracy, "holdout_accuracy"));
  }
  training["curve"] = std::move(curve);
  result.checkpoint = with_training_metadata(
      checkpoint_from_classifier(result.classifier), std::move(training));
  return result;
}

Tensor perturb_for_training(const Classifier& classifier, const Tensor& x,
                            int label, const NoiseModel& noise, Rng& rng) {
  if (noise.magnitude <= 0.0) return x;
  if (rng.uniform() < noise.pgd_fraction) {
    attacks::AttackConfig cfg;
    cfg.epsilon = noise.magnitude;
    cfg.iterations = noise.pgd_iterations;
    cfg.random_start = true;
    cfg.seed = rng.next();
    const defenses::IdentityDefense identity;
    return attacks::pgd(classifier, identity, x, label, cfg).adversarial;
  }
  Tensor noisy(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] + rng.uniform(-noise.magnitude, noise.magnitude);
    noisy[i] = std::min(std::max(v, 0.0), 1.0);
  }
  return noisy;
}

double guided_loss(const Classifier& classifier, const Denoiser& denoiser,
                   const std::vector<Tensor>& noisy,
                   const std::vector<Tensor>& clean) {
  if (noisy.empty()) throw InputError("guided_loss: empty input set");
  if (noisy.size() != clean.size()) {
    throw ConsistencyError("guided_loss: " + std::to_string(noisy.size()) +
                           " noisy images but " +
                           std::to_string(clean.size()) + " clean");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const Tensor restored = classifier.predict(denoiser.denoise(noisy[i]));
    const Tensor reference = classifier.predict(clean[i]);
    for (std::size_t j = 0; j < restored.size(); ++j) {
      total += std::fabs(restored[j] - reference[j]);
    }
  }
  return total / static_cast<double>(noisy.size());
}

DenoiserTrainResult train_guided_denoiser(const Classifier& classifier,
                                          const std::vector<LayerSpec>& layers,
                                          const std::vector<Tensor>& images,
                                          const std::vector<int>& labels,
                                          const TrainConfig& config) {
  config.validate();
  const InputSpec& input = classifier.input();
  check_examples(input, classifier.classes(), images, labels);

  Rng rng(config.seed);
  DenoiserTrainResult result{Denoiser{Network(input, layers)}, {}, 0.0, {}};
  result.denoiser.network().init_parameters(rng);
  // Zero the last parameterized layer so the correction branch starts at
  // zero and the untrained denoiser is the exact identity map; the baseline
  // below therefore measures the undenoised guided loss.
  {
    std::vector<Tensor*> params = result.denoiser.network().parameters();
    for (std::size_t k = params.size() >= 2 ? params.size() - 2 : 0;
         k < params.size(); ++k) {
      std::fill(params[k]->data(), params[k]->data() + params[k]->size(), 0.0);
    }
  }

  auto [train_idx, held_idx] = split_holdout(images.size(),
                                             config.holdout_fraction);
  const std::vector<std::size_t>& eval_idx =
      held_idx.empty() ? train_idx : held_idx;

  // The classifier is frozen: clean logits are constants of the run.
  std::vector<Tensor> clean_logits(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    clean_logits[i] = classifier.predict(images[i]);
  }

  // Fixed holdout noisy set so the epoch curve measures one distribution.
  std::vector<Tensor> held_noisy, held_clean;
  held_noisy.reserve(eval_idx.size());
  held_clean.reserve(eval_idx.size());
  for (std::size_t idx : eval_idx) {
    held_noisy.push_back(perturb_for_training(classifier, images[idx],
                                              labels[idx], config.noise, rng));
    held_clean.push_back(images[idx]);
  }

  result.baseline_holdout_loss =
      guided_loss(classifier, result.denoiser, held_noisy, held_clean);

  std::vector<Tensor*> params = result.denoiser.network().parameters();
  std::vector<Tensor> best(params.size());
  for (std::size_t p = 0; p < params.size(); ++p) best[p] = *params[p];
  double best_holdout = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    fisher_yates(train_idx, rng);
    double epoch_loss = 0.0;

    for (std::size_t begin = 0; begin < train_idx.size();
         begin += config.batch_size) {
      const std::size_t end =
          std::min(begin + config.batch_size, train_idx.size());
      std::vector<Tensor> acc;
      for (Tensor* p : params) acc.emplace_back(p->shape());

      try {
        for (std::size_t b = begin; b < end; ++b) {
          const std::size_t idx = train_idx[b];
          const Tensor noisy = perturb_for_training(
              classifier, images[idx], labels[idx], config.noise, rng);
          Tape tape;
          std::vector<Var> pvars;
          Var xv = tape.leaf(noisy);
          Var restored = result.denoiser.forward(tape, xv, &pvars);
          Var logits = classifier.forward(tape, restored);
          Var reference = tape.leaf(clean_logits[idx]);
          Var loss = tape.sum(tape.abs(tape.sub(logits, reference)));
          epoch_loss += tape.value(loss)[0];
          const Gradients grads = tape.backward(loss);
          for (std::size_t p = 0; p < pvars.size(); ++p) {
            const Tensor& g = grads.grad(pvars[p]);
            for (std::size_t i = 0; i < g.size(); ++i) acc[p][i] += g[i];
          }
        }
      } catch (const NumericError& e) {
        throw TrainingError("denoiser training diverged at epoch " +
                            std::to_string(epoch) + ": " + e.what());
      }

      apply_update(params, acc,
                   config.learning_rate / static_cast<double>(end - begin));
    }

    epoch_loss /= static_cast<double>(train_idx.size());
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("denoiser training diverged at epoch " +
                          std::to_string(epoch));
    }
    const double holdout =
        guided_loss(classifier, result.denoiser, held_noisy, held_clean);
    result.curve.push_back({epoch_loss, holdout});
    if (holdout < best_holdout) {
      best_holdout = holdout;
      best_epoch = epoch;
      for (std::size_t p = 0; p < params.size(); ++p) best[p] = *params[p];
    }
  }

  // Keep the epoch that generalized best on the fixed holdout set; the
  // noise redraw makes the raw curve oscillate.
  for (std::size_t p = 0; p < params.size(); ++p) *params[p] = best[p];

  ordered_json training;
  training["seed"] = config.seed;
  training["epochs"] = config.epochs;
  training["learning_rate"] = config.learning_rate;
  training["batch_size"] = config.batch_size;
  training["holdout_fraction"] = config.holdout_fraction;
  training["noise"] = {{"magnitude", config.noise.magnitude},
                       {"pgd_fraction", config.noise.pgd_fraction},
                       {"pgd_iterations", config.noise.pgd_iterations}};
  training["baseline_holdout_loss"] = result.baseline_holdout_loss;
  training["final_train_loss"] =
      result.curve.empty() ? 0.0 : result.curve.back().train_loss;
  training["best_epoch"] = best_epoch;
  training["holdout_loss"] =
      result.curve.empty() ? result.baseline_holdout_loss : best_holdout;
  ordered_json curve = ordered_json::array();
  for (const DenoiserEpoch& e : result.curve) {
    curve.push_back(curve_entry(e.train_loss, "train_loss", e.holdout_loss,
                                "holdout_loss"));
  }
  training["curve"] = std::move(curve);
  result.checkpoint = with_training_metadata(
      checkpoint_from_denoiser(result.denoiser), std::move(training));
  return result;
}

}  // namespace gauntlet::models
