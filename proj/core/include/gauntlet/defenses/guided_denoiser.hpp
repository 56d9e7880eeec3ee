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

#include <memory>
#include <string>

#include "gauntlet/defenses/defense.hpp"
#include "gauntlet/models/network.hpp"

namespace gauntlet::defenses {

/// Deterministic, differentiable pipeline: clip(denoiser(x), 0, 1). The
/// traced path records the denoiser forward and the clamp on the caller's
/// tape, so attack gradients flow end to end.
class GuidedDenoiserDefense final : public DefensePipeline {
 public:
  explicit GuidedDenoiserDefense(
      std::shared_ptr<const models::Denoiser> denoiser)
      : denoiser_(std::move(denoiser)) {}

  std::string name() const override { return "guided-denoiser"; }
  bool differentiable() const override { return true; }
  bool randomized() const override { return false; }
  Tensor apply(const Tensor& x, Rng& rng) const override;
  Var apply_traced(Tape& tape, Var x) const override;

  const models::Denoiser& denoiser() const { return *denoiser_; }

 private:
  std::shared_ptr<const models::Denoiser> denoiser_;
};

}  // namespace gauntlet::defenses
