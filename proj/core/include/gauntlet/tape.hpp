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

#include "gauntlet/tensor.hpp"

namespace gauntlet {

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

class Gradients;

/// Reverse-mode differentiation tape.
///
/// Operations evaluate eagerly and append a record holding the operand
/// references, the produced value, and what the local backward rule needs.
/// Records are stored in the order they were created, so every record's
/// operands precede it and a single reverse sweep visits each exactly once.
///
/// A Tape is single-threaded; concurrent computations each own a private
/// tape. Backward is deterministic: identical inputs give bit-identical
/// gradients.
class Tape {
 public:
  enum class Op : std::uint8_t {
    kLeaf,
    kAdd,
    kSub,
    kMul,
    kScale,
    kMatmul,
    kConv2d,
    kBiasChannel,
    kRelu,
    kAbs,
    kSum,
    kReshape,
    kClamp01,
    kSoftmaxCrossEntropy,
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Registers a leaf value (input or parameter) on the tape.
  Var leaf(Tensor value);

  const Tensor& value(Var v) const { return node(v.id).value; }
  std::size_t size() const { return nodes_.size(); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double factor);

  /// Standard matrix product of rank-2 tensors [m x k] . [k x n].
  Var matmul(Var a, Var b);

  /// 2-D cross-correlation with zero padding and unit stride.
  /// input [C_in x H x W], kernels [C_out x C_in x kH x kW].
  Var conv2d(Var input, Var kernels, int padding);

  /// Adds bias[c] to every spatial position of channel c.
  Var bias_channel(Var input, Var bias);

  /// Elementwise max(0, v). Subgradient at 0 is 0.
  Var relu(Var a);

  Var abs(Var a);

  /// Sum of all elements, as a scalar (shape [1]).
  Var sum(Var a);

  Var reshape(Var a, Shape shape);

  /// Clamp to [0, 1]; gradient passes where the input lies in [0, 1].
  Var clamp01(Var a);

  /// -log softmax(logits)[label], computed in log-sum-exp form.
  /// logits must be rank 1; 0 <= label < C.
  Var softmax_cross_entropy(Var logits, int label);

  /// Reverse sweep from a scalar loss. Raises ContractError if the loss is
  /// not a single-element tensor.
  Gradients backward(Var loss) const;

  /// Distance from the recorded relu/clamp operand values to their nearest
  /// kink (0 for relu; 0 and 1 for clamp). +infinity when the tape holds no
  /// nonsmooth op. Finite-difference checks skip points where this is small.
  double kink_margin() const;

 private:
  friend class Gradients;

  struct Node {
    Op op = Op::kLeaf;
    int a = -1;
    int b = -1;
    int iaux = 0;      // conv padding / cross-entropy label
    double daux = 0.0; // scale factor
    Tensor value;
    Tensor saved;      // softmax probabilities for cross-entropy
  };

  const Node& node(int id) const;
  Var record(Node node, const char* op_name);

  std::vector<Node> nodes_;
};

/// Result of Tape::backward: a gradient per tape node, zero for nodes the
/// loss does not depend on.
class Gradients {
 public:
  /// Gradient of the loss with respect to the node behind `v`.
  const Tensor& grad(Var v) const;

 private:
  friend class Tape;
  Gradients(const Tape* tape, std::vector<Tensor> grads)
      : tape_(tape), grads_(std::move(grads)) {}

  const Tape* tape_;
  mutable std::vector<Tensor> grads_;  // empty tensor = all-zero gradient
};

}  // namespace gauntlet
