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
#include <functional>
#include <optional>
#include <vector>

#include "gauntlet/defenses/defense.hpp"
#include "gauntlet/models/network.hpp"
#include "gauntlet/rng.hpp"
#include "gauntlet/tensor.hpp"

namespace gauntlet::attacks {

/// How PGD obtains gradients of the defended loss.
/// kAuto picks kDirect for differentiable defenses and kBpda otherwise.
/// kDirect on a non-differentiable defense is a contract violation.
enum class GradientRoute { kAuto, kDirect, kBpda };

struct AttackConfig {
  double epsilon = 4.0 / 255.0;
  std::optional<double> alpha;  // step size; defaults to epsilon/10
  int iterations = 100;
  bool random_start = true;
  bool targeted = false;
  std::optional<int> target;
  /// Defense-randomness gradient averaging (BPDA sample count). Defaults to
  /// 10 for randomized defenses and 1 for deterministic ones.
  std::optional<int> gradient_samples;
  GradientRoute route = GradientRoute::kAuto;
  std::uint64_t seed = 0;

  double step_size() const { return alpha ? *alpha : epsilon / 10.0; }
  int samples_for(const defenses::DefensePipeline& defense) const;

  /// Raises ConfigError on: epsilon outside [0,1], negative iterations,
  /// non-positive step size with iterations > 0, targeted without a target,
  /// or gradient_samples < 1.
  void validate() const;
};

struct AdversarialExample {
  Tensor input;
  Tensor adversarial;
  int label = 0;
  std::optional<int> target;
  double linf = 0.0;
  /// Attack objective (the quantity PGD ascends) at iterates x_0 .. x_N;
  /// for untargeted attacks this is the cross-entropy loss, for targeted
  /// attacks its negation under the target label.
  std::vector<double> loss_trace;
  std::size_t best_iteration = 0;
};

/// Elementwise clamp of x_adv to [x - epsilon, x + epsilon], then to [0,1].
/// Idempotent. Raises DimensionError on shape mismatch.
Tensor project_linf(const Tensor& x_adv, const Tensor& x, double epsilon);

/// Objective for the generic PGD core: value to ascend plus its gradient
/// at the evaluation point.
struct ObjectiveEval {
  double value = 0.0;
  Tensor gradient;
};
using Objective = std::function<ObjectiveEval(const Tensor& point)>;

/// Called with every accepted iterate: k = 0 for the start point, then once
/// per iteration. Used by trajectory-identity tests.
using IterateObserver = std::function<void(int iteration, const Tensor&)>;

struct PgdOptions {
  double epsilon = 0.0;
  double alpha = 0.0;
  int iterations = 0;
  bool random_start = false;
};

struct PgdResult {
  Tensor best;
  std::size_t best_iteration = 0;
  std::vector<double> objective_trace;  // objective at x_0 .. x_N
};

/// Projected gradient ascent core: optional uniform random start in
/// [-epsilon, epsilon], then iterations of
///   x_{k+1} = project_linf(x_k + alpha * sign(g_k), x, epsilon)
/// with sign(0) = 0. Returns the iterate with the highest objective; the
/// first such iterate wins ties, so max over the trace is non-decreasing in
/// the iteration budget for a fixed seed.
PgdResult pgd_with_objective(const Tensor& x, const Objective& objective,
                             const PgdOptions& options, Rng& rng_start,
                             const IterateObserver& observer = {});

/// One BPDA gradient estimate: the defended loss averaged over `samples`
/// draws of defense randomness, and its gradient under the identity
/// surrogate (d defense / d x ~ I), i.e. the classifier gradient evaluated
/// at each defended point, averaged.
struct BpdaGradient {
  Tensor gradient;
  double mean_loss = 0.0;
};

/// Raises ConfigError when samples < 1. Deterministic given the rng state;
/// deterministic defenses leave the rng untouched, making the estimate with
/// samples = 1 exactly the classifier gradient at defense(x_adv).
BpdaGradient bpda_gradient(const models::Classifier& classifier,
                           const defenses::DefensePipeline& defense,
                           const Tensor& x_adv, int loss_label, int samples,
                           Rng& rng);

/// Full PGD attack against a defended classifier. Untargeted attacks ascend
/// cross-entropy under the true label y; targeted attacks descend it under
/// the target. Gradients flow through the traced defense (kDirect) or via
/// bpda_gradient (kBpda). Deterministic given config.seed: the random start
/// and the defense-sampling randomness come from independent streams derived
/// from it (streams 1 and 2), so routes that never sample the defense
/// consume identical randomness.
///
/// The returned example always satisfies ||x_adv - x||_inf <= epsilon +
/// 1e-12 and x_adv in [0,1]; violation raises ContractError.
AdversarialExample pgd(const models::Classifier& classifier,
                       const defenses::DefensePipeline& defense,
                       const Tensor& x, int y, const AttackConfig& config,
                       const IterateObserver& observer = {});

struct SuccessResult {
  bool success = false;
  int votes = 0;
  std::vector<int> predictions;  // one classify result per trial
};

/// Votes classify(defense(x_adv)) over `trials` draws of defense randomness.
/// Targeted (target present): success iff at least `threshold` votes equal
/// the target. Untargeted: success iff at least `threshold` votes differ
/// from y. Raises ConfigError unless trials >= 1 and 1 <= threshold <=
/// trials. Defaults used by the harness: trials=10, threshold=9.
SuccessResult attack_success(const models::Classifier& classifier,
                             const defenses::DefensePipeline& defense,
                             const Tensor& x_adv, int y,
                             std::optional<int> target, int trials,
                             int threshold, Rng& rng);

}  // namespace gauntlet::attacks
