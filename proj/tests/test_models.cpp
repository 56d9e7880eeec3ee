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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gauntlet/errors.hpp"
#include "gauntlet/models/checkpoint.hpp"
#include "gauntlet/models/network.hpp"
#include "gauntlet/models/train.hpp"
#include "gauntlet/rng.hpp"
#include "oracles.hpp"

using namespace gauntlet;
using namespace gauntlet::models;

namespace {

// Two linearly separable clusters in 2 features, labels 0/1, generous
// margin. Images are [1x1x2] so the standard training path applies.
struct ToySet {
  std::vector<Tensor> images;
  std::vector<int> labels;
};

ToySet separable_toy_set(std::size_t n, Rng& rng) {
  ToySet set;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double cx = label == 0 ? 0.2 : 0.8;
    set.images.push_back(Tensor({1, 1, 2}, {cx + rng.uniform(-0.1, 0.1),
                                            cx + rng.uniform(-0.1, 0.1)}));
    set.labels.push_back(label);
  }
  return set;
}

// Classic perceptron; converges iff the set is separable. Used purely to
// certify the toy-set construction, independent of the training code.
bool perceptron_separates(const ToySet& set, int max_sweeps = 1000) {
  double w0 = 0, w1 = 0, b = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool clean = true;
    for (std::size_t i = 0; i < set.images.size(); ++i) {
      const double x0 = set.images[i][0], x1 = set.images[i][1];
      const int y = set.labels[i] == 1 ? 1 : -1;
      if (y * (w0 * x0 + w1 * x1 + b) <= 0) {
        w0 += y * x0;
        w1 += y * x1;
        b += y;
        clean = false;
      }
    }
    if (clean) return true;
  }
  return false;
}

std::vector<std::uint8_t> checkpoint_bytes(const Classifier& c) {
  return encode_checkpoint(checkpoint_from_classifier(c));
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("network construction and predict") {
  InputSpec input{1, 4, 4};
  SUBCASE("zero-initialized network predicts class 0 by tie rule") {
    Classifier clf(Network(input, desk_classifier_layers(input, 10)), 10);
    Tensor x = Tensor::full(input.shape(), 0.5);
    Tensor logits = clf.predict(x);
    REQUIRE(logits.shape() == Shape{10});
    for (double v : logits.values()) CHECK(v == 0.0);
    CHECK(clf.classify(x) == 0);
  }
  SUBCASE("predict is pure") {
    Rng rng(3);
    Classifier clf = make_desk_classifier(input, 10, rng);
    Rng noise_rng(4);
    Tensor x(input.shape());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = noise_rng.uniform();
    CHECK(clf.predict(x) == clf.predict(x));
  }
  SUBCASE("input shape is validated") {
    Rng rng(3);
    Classifier clf = make_desk_classifier(input, 10, rng);
    CHECK_THROWS_AS(clf.predict(Tensor({1, 5, 5})), DimensionError);
  }
  SUBCASE("layer chaining is validated at construction") {
    std::vector<LayerSpec> bad = {LayerSpec::flatten(),
                                  LayerSpec::dense(7, 3)};  // 16 features in
    CHECK_THROWS_AS(Network(input, bad), DimensionError);
  }
  SUBCASE("denoiser output shape equals input shape and zero init is identity") {
    Denoiser den(Network(input, desk_denoiser_layers(input)));
    Tensor x(input.shape());
    Rng rng(5);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform();
    Tensor out = den.denoise(x);
    REQUIRE(out.shape() == x.shape());
    CHECK(out == x);
  }
}

TEST_CASE("train_classifier") {
  InputSpec input{1, 1, 2};
  std::vector<LayerSpec> layers = {LayerSpec::flatten(),
                                   LayerSpec::dense(2, 2)};
  Rng rng(21);
  ToySet toy = separable_toy_set(40, rng);
  REQUIRE(perceptron_separates(toy));

  TrainConfig config;
  config.batch_size = 4;
  config.holdout_fraction = 0.1;
  config.seed = 9;

  SUBCASE("learning rate 0 leaves parameters at initialization") {
    TrainConfig init_only = config;
    init_only.epochs = 0;
    TrainConfig zero_step = config;
    zero_step.learning_rate = 0.0;
    zero_step.epochs = 5;
    auto a = train_classifier(input, layers, 2, toy.images, toy.labels,
                              init_only);
    auto b = train_classifier(input, layers, 2, toy.images, toy.labels,
                              zero_step);
    CHECK(checkpoint_bytes(a.classifier) == checkpoint_bytes(b.classifier));
  }
  SUBCASE("separable toy set reaches 100% holdout accuracy") {
    config.learning_rate = 0.5;
    config.epochs = 50;
    auto result =
        train_classifier(input, layers, 2, toy.images, toy.labels, config);
    REQUIRE(result.curve.size() == 50);
    CHECK(result.curve.back().holdout_accuracy == 1.0);
  }
  SUBCASE("same seed twice gives bit-identical checkpoints") {
    config.epochs = 3;
    auto a = train_classifier(input, layers, 2, toy.images, toy.labels, config);
    auto b = train_classifier(input, layers, 2, toy.images, toy.labels, config);
    CHECK(encode_checkpoint(a.checkpoint) == encode_checkpoint(b.checkpoint));
  }
  SUBCASE("empty dataset raises InputError") {
    CHECK_THROWS_AS(train_classifier(input, layers, 2, {}, {}, config),
                    InputError);
  }
  SUBCASE("image/label count mismatch raises ConsistencyError") {
    CHECK_THROWS_AS(train_classifier(input, layers, 2, toy.images,
                                     std::vector<int>{0}, config),
                    ConsistencyError);
  }
  SUBCASE("out-of-range label raises IndexError") {
    std::vector<int> bad_labels = toy.labels;
    bad_labels[5] = 2;
    CHECK_THROWS_AS(
        train_classifier(input, layers, 2, toy.images, bad_labels, config),
        IndexError);
  }
  SUBCASE("divergence raises TrainingError naming the epoch") {
    config.learning_rate = 1e155;  // one step overflows the logits
    config.epochs = 2;
    CHECK_THROWS_WITH_AS(
        train_classifier(input, layers, 2, toy.images, toy.labels, config),
        doctest::Contains("epoch"), TrainingError);
  }
  SUBCASE("invalid configs are rejected") {
    TrainConfig bad = config;
    bad.learning_rate = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.batch_size = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.holdout_fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("train_guided_denoiser") {
  InputSpec input{1, 4, 4};
  Rng rng(31);
  Classifier classifier = make_desk_classifier(input, 4, rng);
  std::vector<Tensor> images;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    Tensor x(input.shape());
    for (std::size_t p = 0; p < x.size(); ++p) x[p] = rng.uniform();
    images.push_back(x);
    labels.push_back(i % 4);
  }

  SUBCASE("identity denoiser on clean inputs has guided loss 0") {
    Denoiser identity(Network(input, desk_denoiser_layers(input)));
    CHECK(guided_loss(classifier, identity, images, images) == 0.0);
  }
  SUBCASE("guided loss is non-negative") {
    Rng drng(7);
    Denoiser den = make_desk_denoiser(input, drng);
    std::vector<Tensor> noisy = images;
    for (Tensor& x : noisy) {
      for (std::size_t p = 0; p < x.size(); ++p) {
        x[p] = std::clamp(x[p] + drng.uniform(-0.2, 0.2), 0.0, 1.0);
      }
    }
    CHECK(guided_loss(classifier, den, noisy, images) >= 0.0);
  }
  SUBCASE("training beats the untrained baseline on the holdout") {
    TrainConfig config;
    config.learning_rate = 1e-4;
    config.epochs = 2;
    config.batch_size = 8;
    config.seed = 11;
    config.noise.pgd_iterations = 3;
    auto result = train_guided_denoiser(classifier, desk_denoiser_layers(input),
                                        images, labels, config);
    REQUIRE(result.curve.size() == 2);
    double best = result.curve[0].holdout_loss;
    for (const auto& e : result.curve) best = std::min(best, e.holdout_loss);
    CHECK(best < result.baseline_holdout_loss);
  }
  SUBCASE("classifier parameters are never touched") {
    const std::vector<std::uint8_t> before = checkpoint_bytes(classifier);
    TrainConfig config;
    config.learning_rate = 1e-4;
    config.epochs = 1;
    config.batch_size = 8;
    config.noise.pgd_iterations = 2;
    train_guided_denoiser(classifier, desk_denoiser_layers(input), images,
                          labels, config);
    CHECK(checkpoint_bytes(classifier) == before);
  }
  SUBCASE("deterministic given the seed") {
    TrainConfig config;
    config.learning_rate = 1e-4;
    config.epochs = 1;
    config.batch_size = 8;
    config.seed = 13;
    config.noise.pgd_iterations = 2;
    auto a = train_guided_denoiser(classifier, desk_denoiser_layers(input),
                                   images, labels, config);
    auto b = train_guided_denoiser(classifier, desk_denoiser_layers(input),
                                   images, labels, config);
    CHECK(encode_checkpoint(a.checkpoint) == encode_checkpoint(b.checkpoint));
  }
}

TEST_CASE("checkpoint format") {
  InputSpec input{1, 4, 4};
  Rng rng(41);
  Classifier clf = make_desk_classifier(input, 3, rng);
  Checkpoint ckpt = checkpoint_from_classifier(clf);

  SUBCASE("save/load round trip is bit-exact") {
    const std::string path = temp_path("gauntlet_ckpt_roundtrip.ckpt");
    save_checkpoint(path, ckpt);
    Checkpoint loaded = load_checkpoint(path);
    CHECK(loaded.version == ckpt.version);
    CHECK(loaded.metadata == ckpt.metadata);
    REQUIRE(loaded.tensors.size() == ckpt.tensors.size());
    for (std::size_t i = 0; i < ckpt.tensors.size(); ++i) {
      CHECK(loaded.tensors[i].first == ckpt.tensors[i].first);
      CHECK(loaded.tensors[i].second == ckpt.tensors[i].second);
    }
    std::filesystem::remove(path);
  }
  SUBCASE("encoded length follows the format definition") {
    const std::vector<std::uint8_t> bytes = encode_checkpoint(ckpt);
    std::size_t want = 4 + 4 + 4 + ckpt.metadata.size() + 4;
    for (const auto& [name, tensor] : ckpt.tensors) {
      want += 2 + name.size() + 1 + 4 * tensor.rank() + 8 * tensor.size();
    }
    CHECK(bytes.size() == want);
  }
  SUBCASE("corrupted magic raises FormatError") {
    std::vector<std::uint8_t> bytes = encode_checkpoint(ckpt);
    bytes[0] = 'X';
    CHECK_THROWS_AS(decode_checkpoint(bytes), FormatError);
  }
  SUBCASE("unsupported version raises FormatError") {
    std::vector<std::uint8_t> bytes = encode_checkpoint(ckpt);
    bytes[4] = 99;
    CHECK_THROWS_AS(decode_checkpoint(bytes), FormatError);
  }
  SUBCASE("truncation names expected vs actual length") {
    std::vector<std::uint8_t> bytes = encode_checkpoint(ckpt);
    bytes.resize(bytes.size() - 10);
    CHECK_THROWS_WITH_AS(decode_checkpoint(bytes),
                         doctest::Contains("expected"), FormatError);
  }
  SUBCASE("classifier round trips through its checkpoint") {
    Classifier again = classifier_from_checkpoint(ckpt);
    CHECK(checkpoint_bytes(again) == checkpoint_bytes(clf));
    Tensor x = Tensor::full(input.shape(), 0.3);
    CHECK(again.predict(x) == clf.predict(x));
  }
  SUBCASE("denoiser checkpoints carry their architecture") {
    Rng drng(42);
    Denoiser den = make_desk_denoiser(input, drng);
    Checkpoint dckpt = checkpoint_from_denoiser(den);
    Denoiser again = denoiser_from_checkpoint(dckpt);
    Tensor x = Tensor::full(input.shape(), 0.6);
    CHECK(again.denoise(x) == den.denoise(x));
    // A classifier loader must refuse a denoiser checkpoint.
    CHECK_THROWS_AS(classifier_from_checkpoint(dckpt), FormatError);
  }
}
