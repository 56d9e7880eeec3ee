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

#include "gauntlet/defenses/guided_denoiser.hpp"

namespace gauntlet::defenses {

Tensor GuidedDenoiserDefense::apply(const Tensor& x, Rng&) const {
  return clamp(denoiser_->denoise(x), 0.0, 1.0);
}

Var GuidedDenoiserDefense::apply_traced(Tape& tape, Var x) const {
  return tape.clamp01(denoiser_->forward(tape, x));
}

}  // namespace gauntlet::defenses
