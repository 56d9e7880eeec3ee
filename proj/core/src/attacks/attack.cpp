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

#include "gauntlet/attacks/attack.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gauntlet/errors.hpp"
#include "gauntlet/tape.hpp"

namespace gauntlet::attacks {
namespace {

// Stream tags for deriving independent rng streams from the attack seed.
constexpr std::uint64_t kStreamRandomStart = 1;
constexpr std::uint64_t kStreamDefenseSamples = 2;

double sgn(double v) {
  if (v > 0.0) return 1.0;
  if (v < 0.0) return -1.0;
  return 0.0;
}

}  // namespace

int AttackConfig::samples_for(const defenses::DefensePipeline& defense) const {
  if (gradient_samples) return *gradient_samples;
  return defense.randomized() ? 10 : 1;
}

void AttackConfig::validate() const {
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw ConfigError("attack: epsilon must lie in [0,1], got " +
                      std::to_string(epsilon));
  }
  if (iterations < 0) {
    throw ConfigError("attack: iterations must be >= 0, got " +
                      std::to_string(iterations));
  }
  if (alpha && *alpha <= 0.0) {
    throw ConfigError("attack: alpha must be > 0, got " +
                      std::to_string(*alpha));
  }
  if (iterations > 0 && step_size() <= 0.0) {
    throw ConfigError("attack: step size must be > 0 when iterating");
  }
  if (targeted && !target) {
    throw ConfigError("attack: targeted attack requires a target label");
  }
  if (gradient_samples && *gradient_samples < 1) {
    throw ConfigError("attack: gradient_samples must be >= 1, got " +
                      std::to_string(*gradient_samples));
  }
}

Tensor project_linf(const Tensor& x_adv, const Tensor& x, double epsilon) {
  if (!x_adv.same_shape(x)) {
    throw DimensionError("project_linf: shape mismatch " +
                         shape_string(x_adv.shape()) + " vs " +
                         shape_string(x.shape()));
  }
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = x[i] - epsilon;
    const double hi = x[i] + epsilon;
    double v = std::min(std::max(x_adv[i], lo), hi);
    out[i] = std::min(std::max(v, 0.0), 1.0);
  }
  return out;
}

PgdResult pgd_with_objective(const Tensor& x, const Objective& objective,
                             const PgdOptions& options, Rng& rng_start,
                             const IterateObserver& observer) {
  Tensor current = x;
  if (options.random_start && options.epsilon > 0.0) {
    for (std::size_t i = 0; i < current.size(); ++i) {
      current[i] = x[i] + rng_start.uniform(-options.epsilon, options.epsilon);
    }
  }
  current = project_linf(current, x, options.epsilon);

  PgdResult result;
  result.objective_trace.reserve(
      static_cast<std::size_t>(options.iterations) + 1);

  ObjectiveEval eval = objective(current);
  result.objective_trace.push_back(eval.value);
  if (observer) observer(0, current);
  result.best = current;
  result.best_iteration = 0;
  double best_value = eval.value;

  for (int k = 1; k <= options.iterations; ++k) {
    Tensor next(current.shape());
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = current[i] + options.alpha * sgn(eval.gradient[i]);
    }
    next = project_linf(next, x, options.epsilon);
    eval = objective(next);
    result.objective_trace.push_back(eval.value);
    if (observer) observer(k, next);
    if (eval.value > best_value) {
      best_value = eval.value;
      result.best = next;
      result.best_iteration = static_cast<std::size_t>(k);
    }
    current = std::move(next);
  }
  return result;
}

BpdaGradient bpda_gradient(const models::Classifier& classifier,
                           const defenses::DefensePipeline& defense,
                           const Tensor& x_adv, int loss_label, int samples,
                           Rng& rng) {
  if (samples < 1) {
    throw ConfigError("bpda_gradient: samples must be >= 1, got " +
                      std::to_string(samples));
  }
  BpdaGradient out;
  out.gradient = Tensor(x_adv.shape());
  for (int s = 0; s < samples; ++s) {
    const Tensor z = defense.apply(x_adv, rng);
    Tape tape;
    Var zv = tape.leaf(z);
    Var logits = classifier.forward(tape, zv);
    Var loss = tape.softmax_cross_entropy(logits, loss_label);
    out.mean_loss += tape.value(loss)[0];
    const Gradients grads = tape.backward(loss);
    const Tensor& g = grads.grad(zv);
    for (std::size_t i = 0; i < g.size(); ++i) out.gradient[i] += g[i];
  }
  const double inv = 1.0 / static_cast<double>(samples);
  out.mean_loss *= inv;
  for (std::size_t i = 0; i < out.gradient.size(); ++i) out.gradient[i] *= inv;
  return out;
}

AdversarialExample pgd(const models::Classifier& classifier,
                       const defenses::DefensePipeline& defense,
                       const Tensor& x, int y, const AttackConfig& config,
                       const IterateObserver& observer) {
  config.validate();

  GradientRoute route = config.route;
  if (route == GradientRoute::kAuto) {
    route = defense.differentiable() ? GradientRoute::kDirect
                                     : GradientRoute::kBpda;
  }
  if (route == GradientRoute::kDirect && !defense.differentiable()) {
    throw ContractError("pgd: defense '" + defense.name() +
                        "' is not differentiable; use the BPDA route");
  }

  const int label = config.targeted ? *config.target : y;
  const double flip = config.targeted ? -1.0 : 1.0;
  const int samples = config.samples_for(defense);

  Rng rng_start(derive_seed({config.seed, kStreamRandomStart}));
  Rng rng_defense(derive_seed({config.seed, kStreamDefenseSamples}));

  Objective objective;
  if (route == GradientRoute::kDirect) {
    objective = [&](const Tensor& point) {
      Tape tape;
      Var pv = tape.leaf(point);
      Var z = defense.apply_traced(tape, pv);
      Var logits = classifier.forward(tape, z);
      Var loss = tape.softmax_cross_entropy(logits, label);
      const Gradients grads = tape.backward(loss);
      ObjectiveEval eval;
      eval.value = flip * tape.value(loss)[0];
      eval.gradient = grads.grad(pv);
      if (flip < 0.0) {
        for (std::size_t i = 0; i < eval.gradient.size(); ++i) {
          eval.gradient[i] = -eval.gradient[i];
        }
      }
      return eval;
    };
  } else {
    objective = [&](const Tensor& point) {
      BpdaGradient bg =
          bpda_gradient(classifier, defense, point, label, samples,
                        rng_defense);
      ObjectiveEval eval;
      eval.value = flip * bg.mean_loss;
      eval.gradient = std::move(bg.gradient);
      if (flip < 0.0) {
        for (std::size_t i = 0; i < eval.gradient.size(); ++i) {
          eval.gradient[i] = -eval.gradient[i];
        }
      }
      return eval;
    };
  }

  PgdOptions options;
  options.epsilon = config.epsilon;
  options.alpha = config.step_size();
  options.iterations = config.iterations;
  options.random_start = config.random_start;

  PgdResult run = pgd_with_objective(x, objective, options, rng_start,
                                     observer);

  AdversarialExample example;
  example.input = x;
  example.adversarial = std::move(run.best);
  example.label = y;
  example.target = config.targeted ? config.target : std::nullopt;
  example.linf = linf_distance(example.adversarial, x);
  example.loss_trace = std::move(run.objective_trace);
  example.best_iteration = run.best_iteration;

  if (example.linf > config.epsilon + 1e-12) {
    throw ContractError("pgd: budget violated: linf " +
                        std::to_string(example.linf) + " > epsilon " +
                        std::to_string(config.epsilon));
  }
  for (std::size_t i = 0; i < example.adversarial.size(); ++i) {
    const double v = example.adversarial[i];
    if (v < 0.0 || v > 1.0) {
      throw ContractError("pgd: adversarial value " + std::to_string(v) +
                          " outside [0,1]");
    }
  }
  return example;
}

SuccessResult attack_success(const models::Classifier& classifier,
                             const defenses::DefensePipeline& defense,
                             const Tensor& x_adv, int y,
                             std::optional<int> target, int trials,
                             int threshold, Rng& rng) {
  if (trials < 1) {
    throw ConfigError("attack_success: trials must be >= 1, got " +
                      std::to_string(trials));
  }
  if (threshold < 1 || threshold > trials) {
    throw ConfigError("attack_success: threshold must lie in [1, trials], "
                      "got " +
                      std::to_string(threshold) + " with " +
                      std::to_string(trials) + " trials");
  }
  SuccessResult result;
  result.predictions.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const int prediction = classifier.classify(defense.apply(x_adv, rng));
    result.predictions.push_back(prediction);
    const bool vote = target ? prediction == *target : prediction != y;
    if (vote) ++result.votes;
  }
  result.success = result.votes >= threshold;
  return result;
}

}  // namespace gauntlet::attacks
