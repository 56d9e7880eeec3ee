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

#include <string>

#include "gauntlet/rng.hpp"
#include "gauntlet/tape.hpp"
#include "gauntlet/tensor.hpp"

namespace gauntlet::defenses {

/// Input-preprocessing defense. Every pipeline preserves the input shape and
/// returns values in [0,1]. Pipelines are immutable after construction and
/// safe to share across threads; randomness comes only from the caller's rng.
class DefensePipeline {
 public:
  virtual ~DefensePipeline() = default;

  virtual std::string name() const = 0;
  virtual bool differentiable() const = 0;
  virtual bool randomized() const = 0;

  /// True (possibly randomized) forward path. Deterministic pipelines leave
  /// the rng untouched.
  virtual Tensor apply(const Tensor& x, Rng& rng) const = 0;

  /// Traced forward for gradient flow. Only differentiable pipelines provide
  /// this; the default raises ContractError directing callers to BPDA.
  virtual Var apply_traced(Tape& tape, Var x) const;
};

/// No-op defense: apply clips to [0,1] (exact identity for in-range inputs)
/// and the traced path passes the variable through untouched, so attacks
/// against it behave exactly as attacks against the bare classifier.
class IdentityDefense final : public DefensePipeline {
 public:
  std::string name() const override { return "none"; }
  bool differentiable() const override { return true; }
  bool randomized() const override { return false; }
  Tensor apply(const Tensor& x, Rng& rng) const override;
  Var apply_traced(Tape& tape, Var x) const override;
};

}  // namespace gauntlet::defenses
