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
#include <string>
#include <utility>
#include <vector>

#include "gauntlet/rng.hpp"
#include "gauntlet/tape.hpp"
#include "gauntlet/tensor.hpp"

namespace gauntlet::models {

/// Expected input layout: channels x height x width, values in [0, 1].
struct InputSpec {
  std::size_t channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;

  Shape shape() const { return {channels, height, width}; }
  bool operator==(const InputSpec&) const = default;
};

/// One layer in a sequential architecture. Only conv and dense layers carry
/// parameters (a weight tensor and a bias tensor each).
struct LayerSpec {
  enum class Kind { kConv, kRelu, kFlatten, kDense };

  Kind kind = Kind::kRelu;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  int padding = 0;
  std::size_t in_features = 0;
  std::size_t out_features = 0;

  static LayerSpec conv(std::size_t in, std::size_t out, std::size_t kernel,
                        int padding);
  static LayerSpec relu();
  static LayerSpec flatten();
  static LayerSpec dense(std::size_t in, std::size_t out);

  bool has_parameters() const {
    return kind == Kind::kConv || kind == Kind::kDense;
  }
  bool operator==(const LayerSpec&) const = default;
};

/// Sequential network: an architecture plus its parameter tensors.
///
/// The constructor validates that every layer's input shape matches what the
/// previous layer produces, starting from the input spec. Parameters start
/// at zero; call init_parameters for the standard seeded initialization
/// (uniform in +-sqrt(1/fan_in), weights first, then bias, layer by layer).
class Network {
 public:
  Network(InputSpec input, std::vector<LayerSpec> layers);

  void init_parameters(Rng& rng);

  /// Traces the forward pass on the tape and returns the output variable.
  /// Raises DimensionError if x does not match the input spec. When
  /// param_vars is given it receives the tape handle of every parameter
  /// tensor, in parameters() order, so training can read their gradients.
  Var forward(Tape& tape, Var x, std::vector<Var>* param_vars = nullptr) const;

  const InputSpec& input() const { return input_; }
  const std::vector<LayerSpec>& layers() const { return specs_; }
  const Shape& output_shape() const { return output_shape_; }
  std::size_t parameter_count() const;

  std::vector<Tensor*> parameters();
  std::vector<std::pair<std::string, const Tensor*>> named_parameters() const;

  /// Replaces one named parameter; shape must match. Used by checkpoint load.
  void set_parameter(const std::string& name, Tensor value);

 private:
  struct ParamSet {
    Tensor weight;
    Tensor bias;
  };

  InputSpec input_;
  std::vector<LayerSpec> specs_;
  std::vector<ParamSet> params_;  // index-aligned with specs_
  Shape output_shape_;
};

/// Image classifier: sequential network whose output is a logit vector [C].
class Classifier {
 public:
  Classifier(Network network, std::size_t classes);

  /// Traced forward to logits [C].
  Var forward(Tape& tape, Var x, std::vector<Var>* param_vars = nullptr) const;

  /// Pure function of x: two calls with the same input give bit-identical
  /// logits.
  Tensor predict(const Tensor& x) const;

  /// argmax of predict(x); lowest index wins ties.
  int classify(const Tensor& x) const;

  std::size_t classes() const { return classes_; }
  const InputSpec& input() const { return network_.input(); }
  const Network& network() const { return network_; }
  Network& network() { return network_; }

 private:
  Network network_;
  std::size_t classes_;
};

/// Image-to-image denoiser with a residual connection:
/// output = input + correction(input). Output shape always equals input
/// shape, and the zero-parameter network is exactly the identity map.
class Denoiser {
 public:
  explicit Denoiser(Network network);

  Var forward(Tape& tape, Var x, std::vector<Var>* param_vars = nullptr) const;
  Tensor denoise(const Tensor& x) const;

  const InputSpec& input() const { return network_.input(); }
  const Network& network() const { return network_; }
  Network& network() { return network_; }

 private:
  Network network_;
};

/// Default desk-scale classifier: conv(Cx8,3x3,p1)-relu-conv(8x16,3x3,p1)-
/// relu-flatten-dense(16HW x classes).
std::vector<LayerSpec> desk_classifier_layers(const InputSpec& input,
                                              std::size_t classes);

/// Default desk-scale denoiser body: conv(Cx16)-relu-conv(16x16)-relu-
/// conv(16xC), all 3x3 with padding 1, wrapped in the residual connection.
std::vector<LayerSpec> desk_denoiser_layers(const InputSpec& input);

Classifier make_desk_classifier(const InputSpec& input, std::size_t classes,
                                Rng& rng);
Denoiser make_desk_denoiser(const InputSpec& input, Rng& rng);

}  // namespace gauntlet::models
