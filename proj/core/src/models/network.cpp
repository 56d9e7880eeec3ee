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

#include "gauntlet/models/network.hpp"

#include <cmath>

#include "gauntlet/errors.hpp"

namespace gauntlet::models {

LayerSpec LayerSpec::conv(std::size_t in, std::size_t out, std::size_t kernel,
                          int padding) {
  LayerSpec s;
  s.kind = Kind::kConv;
  s.in_channels = in;
  s.out_channels = out;
  s.kernel = kernel;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::relu() {
  LayerSpec s;
  s.kind = Kind::kRelu;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = Kind::kFlatten;
  return s;
}

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out) {
  LayerSpec s;
  s.kind = Kind::kDense;
  s.in_features = in;
  s.out_features = out;
  return s;
}

Network::Network(InputSpec input, std::vector<LayerSpec> layers)
    : input_(input), specs_(std::move(layers)) {
  Shape shape = input_.shape();
  params_.resize(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& s = specs_[i];
    switch (s.kind) {
      case LayerSpec::Kind::kConv: {
        if (shape.size() != 3 || shape[0] != s.in_channels) {
          throw DimensionError("network: conv layer " + std::to_string(i) +
                               " expects " + std::to_string(s.in_channels) +
                               " channels, input is " + shape_string(shape));
        }
        if (s.kernel == 0) {
          throw DimensionError("network: conv layer with zero kernel size");
        }
        const long oh = static_cast<long>(shape[1]) + 2 * s.padding -
                        static_cast<long>(s.kernel) + 1;
        const long ow = static_cast<long>(shape[2]) + 2 * s.padding -
                        static_cast<long>(s.kernel) + 1;
        if (oh < 1 || ow < 1) {
          throw DimensionError("network: conv layer " + std::to_string(i) +
                               " yields non-positive output for input " +
                               shape_string(shape));
        }
        params_[i].weight =
            Tensor({s.out_channels, s.in_channels, s.kernel, s.kernel});
        params_[i].bias = Tensor({s.out_channels});
        shape = {s.out_channels, static_cast<std::size_t>(oh),
                 static_cast<std::size_t>(ow)};
        break;
      }
      case LayerSpec::Kind::kRelu:
        break;
      case LayerSpec::Kind::kFlatten:
        shape = {1, shape_size(shape)};
        break;
      case LayerSpec::Kind::kDense: {
        if (shape.size() != 2 || shape[0] != 1 || shape[1] != s.in_features) {
          throw DimensionError("network: dense layer " + std::to_string(i) +
                               " expects [1x" + std::to_string(s.in_features) +
                               "], input is " + shape_string(shape));
        }
        params_[i].weight = Tensor({s.in_features, s.out_features});
        params_[i].bias = Tensor({1, s.out_features});
        shape = {1, s.out_features};
        break;
      }
    }
  }
  output_shape_ = shape;
}

void Network::init_parameters(Rng& rng) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& s = specs_[i];
    if (!s.has_parameters()) continue;
    const std::size_t fan_in = s.kind == LayerSpec::Kind::kConv
                                   ? s.in_channels * s.kernel * s.kernel
                                   : s.in_features;
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (double& v : params_[i].weight.values()) {
      v = rng.uniform(-bound, bound);
    }
    for (double& v : params_[i].bias.values()) {
      v = rng.uniform(-bound, bound);
    }
  }
}

Var Network::forward(Tape& tape, Var x, std::vector<Var>* param_vars) const {
  if (tape.value(x).shape() != input_.shape()) {
    throw DimensionError("network: input shape " +
                         shape_string(tape.value(x).shape()) +
                         " does not match spec " +
                         shape_string(input_.shape()));
  }
  Var cur = x;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& s = specs_[i];
    switch (s.kind) {
      case LayerSpec::Kind::kConv: {
        Var w = tape.leaf(params_[i].weight);
        Var b = tape.leaf(params_[i].bias);
        if (param_vars) {
          param_vars->push_back(w);
          param_vars->push_back(b);
        }
        cur = tape.bias_channel(tape.conv2d(cur, w, s.padding), b);
        break;
      }
      case LayerSpec::Kind::kRelu:
        cur = tape.relu(cur);
        break;
      case LayerSpec::Kind::kFlatten:
        cur = tape.reshape(cur, {1, tape.value(cur).size()});
        break;
      case LayerSpec::Kind::kDense: {
        Var w = tape.leaf(params_[i].weight);
        Var b = tape.leaf(params_[i].bias);
        if (param_vars) {
          param_vars->push_back(w);
          param_vars->push_back(b);
        }
        cur = tape.add(tape.matmul(cur, w), b);
        break;
      }
    }
  }
  return cur;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const ParamSet& p : params_) n += p.weight.size() + p.bias.size();
  return n;
}

std::vector<Tensor*> Network::parameters() {
  std::vector<Tensor*> out;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (!specs_[i].has_parameters()) continue;
    out.push_back(&params_[i].weight);
    out.push_back(&params_[i].bias);
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> Network::named_parameters()
    const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (!specs_[i].has_parameters()) continue;
    const std::string base = "layer" + std::to_string(i);
    out.emplace_back(base + ".weight", &params_[i].weight);
    out.emplace_back(base + ".bias", &params_[i].bias);
  }
  return out;
}

void Network::set_parameter(const std::string& name, Tensor value) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (!specs_[i].has_parameters()) continue;
    const std::string base = "layer" + std::to_string(i);
    Tensor* slot = nullptr;
    if (name == base + ".weight") slot = &params_[i].weight;
    if (name == base + ".bias") slot = &params_[i].bias;
    if (!slot) continue;
    if (slot->shape() != value.shape()) {
      throw DimensionError("network: parameter " + name + " has shape " +
                           shape_string(slot->shape()) + ", checkpoint has " +
                           shape_string(value.shape()));
    }
    *slot = std::move(value);
    return;
  }
  throw FormatError("network: unknown parameter name '" + name + "'");
}

Classifier::Classifier(Network network, std::size_t classes)
    : network_(std::move(network)), classes_(classes) {
  const Shape want{1, classes_};
  if (network_.output_shape() != want) {
    throw DimensionError("classifier: network output " +
                         shape_string(network_.output_shape()) +
                         " is not a logit row " + shape_string(want));
  }
}

Var Classifier::forward(Tape& tape, Var x,
                        std::vector<Var>* param_vars) const {
  return tape.reshape(network_.forward(tape, x, param_vars), {classes_});
}

Tensor Classifier::predict(const Tensor& x) const {
  Tape tape;
  Var logits = forward(tape, tape.leaf(x));
  return tape.value(logits);
}

int Classifier::classify(const Tensor& x) const {
  return static_cast<int>(argmax(predict(x)));
}

Denoiser::Denoiser(Network network) : network_(std::move(network)) {
  if (network_.output_shape() != network_.input().shape()) {
    throw DimensionError("denoiser: output shape " +
                         shape_string(network_.output_shape()) +
                         " must equal input shape " +
                         shape_string(network_.input().shape()));
  }
}

Var Denoiser::forward(Tape& tape, Var x, std::vector<Var>* param_vars) const {
  return tape.add(x, network_.forward(tape, x, param_vars));
}

Tensor Denoiser::denoise(const Tensor& x) const {
  Tape tape;
  Var out = forward(tape, tape.leaf(x));
  return tape.value(out);
}

std::vector<LayerSpec> desk_classifier_layers(const InputSpec& input,
                                              std::size_t classes) {
  const std::size_t flat = 16 * input.height * input.width;
  return {
      LayerSpec::conv(input.channels, 8, 3, 1),
      LayerSpec::relu(),
      LayerSpec::conv(8, 16, 3, 1),
      LayerSpec::relu(),
      LayerSpec::flatten(),
      LayerSpec::dense(flat, classes),
  };
}

std::vector<LayerSpec> desk_denoiser_layers(const InputSpec& input) {
  return {
      LayerSpec::conv(input.channels, 16, 3, 1),
      LayerSpec::relu(),
      LayerSpec::conv(16, 16, 3, 1),
      LayerSpec::relu(),
      LayerSpec::conv(16, input.channels, 3, 1),
  };
}

Classifier make_desk_classifier(const InputSpec& input, std::size_t classes,
                                Rng& rng) {
  Network net(input, desk_classifier_layers(input, classes));
  net.init_parameters(rng);
  return Classifier(std::move(net), classes);
}

Denoiser make_desk_denoiser(const InputSpec& input, Rng& rng) {
  Network net(input, desk_denoiser_layers(input));
  net.init_parameters(rng);
  return Denoiser(std::move(net));
}

}  // namespace gauntlet::models
