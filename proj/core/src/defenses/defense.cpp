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

#include "gauntlet/defenses/defense.hpp"

#include "gauntlet/errors.hpp"

namespace gauntlet::defenses {

Var DefensePipeline::apply_traced(Tape&, Var) const {
  throw ContractError("defense '" + name() +
                      "' is not differentiable; route the attack through "
                      "BPDA instead of the traced path");
}

Tensor IdentityDefense::apply(const Tensor& x, Rng&) const {
  return clamp(x, 0.0, 1.0);
}

Var IdentityDefense::apply_traced(Tape&, Var x) const { return x; }

}  // namespace gauntlet::defenses
