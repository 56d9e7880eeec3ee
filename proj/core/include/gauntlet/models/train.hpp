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

#include "gauntlet/models/checkpoint.hpp"
#include "gauntlet/models/network.hpp"
#include "gauntlet/rng.hpp"
#include "gauntlet/tensor.hpp"

namespace gauntlet::models {

/// Perturbations applied to denoiser training inputs.
struct NoiseModel {
  double magnitude = 0.2;     // linf scale of both noise kinds
  double pgd_fraction = 0.5;  // probability a sample gets PGD noise
  int pgd_iterations = 10;    // PGD steps against the frozen classifier
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  /// Final fraction of the dataset held out for the accuracy/loss curve;
  /// floor(fraction * n) examples. When that is zero the curve reports the
  /// training set instead.
  double holdout_fraction = 0.1;
  NoiseModel noise;

  /// Raises ConfigError on: negative learning rate (zero is allowed and
  /// performs no update), batch_size < 1, holdout_fraction outside [0,1),
  /// or an invalid noise model.
  void validate() const;
};

struct ClassifierEpoch {
  double train_loss = 0.0;
  double holdout_accuracy = 0.0;
};

struct ClassifierTrainResult {
  Classifier classifier;
  std::vector<ClassifierEpoch> curve;
  /// Checkpoint of the trained parameters; metadata carries the
  /// architecture plus seed, epochs, and the loss/accuracy curve.
  Checkpoint checkpoint;
};

/// Minibatch SGD on softmax cross-entropy. Deterministic given the config
/// seed: initialization, the per-epoch Fisher-Yates shuffle, and batch
/// order all derive from it. Gradients are averaged over each batch.
/// Raises InputError on an empty dataset, ConsistencyError when image and
/// label counts differ, IndexError on an out-of-range label, and
/// TrainingError naming the epoch if the loss diverges.
ClassifierTrainResult train_classifier(const InputSpec& input,
                                       const std::vector<LayerSpec>& layers,
                                       std::size_t classes,
                                       const std::vector<Tensor>& images,
                                       const std::vector<int>& labels,
                                       const TrainConfig& config);

struct DenoiserEpoch {
  double train_loss = 0.0;
  double holdout_loss = 0.0;
};

struct DenoiserTrainResult {
  Denoiser denoiser;
  std::vector<DenoiserEpoch> curve;
  /// Guided loss of the freshly initialized denoiser on the fixed holdout
  /// noisy set, for before/after comparisons.
  double baseline_holdout_loss = 0.0;
  Checkpoint checkpoint;
};

/// Trains the residual denoiser against a frozen classifier by minimizing
/// the guided loss |logits(classifier(denoiser(x~))) - logits(classifier(x))|_1
/// averaged over each batch, where x~ is the clean image plus noise from
/// config.noise: with probability pgd_fraction an untargeted PGD
/// perturbation against the bare classifier, otherwise uniform noise in
/// [-magnitude, magnitude], clamped to [0,1]. Training noise is redrawn
/// every epoch; the holdout noisy inputs are drawn once so the epoch curve
/// measures a fixed set. The classifier is never modified.
///
/// The last parameterized layer is zeroed after initialization, so the
/// untrained denoiser is the exact identity map and baseline_holdout_loss
/// measures the cost of not denoising at all. The returned denoiser carries
/// the parameters of the epoch with the lowest holdout loss, not the last
/// one; the per-epoch noise redraw makes the raw curve oscillate.
DenoiserTrainResult train_guided_denoiser(const Classifier& classifier,
                                          const std::vector<LayerSpec>& layers,
                                          const std::vector<Tensor>& images,
                                          const std::vector<int>& labels,
                                          const TrainConfig& config);

/// Mean guided loss of `denoiser` over pairs of (noisy, clean) images.
double guided_loss(const Classifier& classifier, const Denoiser& denoiser,
                   const std::vector<Tensor>& noisy,
                   const std::vector<Tensor>& clean);

/// One noisy input per the noise model; exposed for baseline tests.
Tensor perturb_for_training(const Classifier& classifier, const Tensor& x,
                            int label, const NoiseModel& noise, Rng& rng);

}  // namespace gauntlet::models
