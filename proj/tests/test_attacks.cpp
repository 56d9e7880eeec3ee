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
#include <cmath>
#include <vector>

#include "doctest.h"
#include "gauntlet/attacks/attack.hpp"
#include "gauntlet/defenses/defense.hpp"
#include "gauntlet/defenses/pixel_deflection.hpp"
#include "gauntlet/errors.hpp"
#include "gauntlet/models/network.hpp"
#include "gauntlet/rng.hpp"
#include "gauntlet/tape.hpp"

using namespace gauntlet;
using namespace gauntlet::attacks;

namespace {

Tensor random_image(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform();
  return t;
}

// Deterministic, non-differentiable preprocessor: snap to a 0.1 grid.
class QuantizeDefense final : public defenses::DefensePipeline {
 public:
  std::string name() const override { return "quantize-test"; }
  bool differentiable() const override { return false; }
  bool randomized() const override { return false; }
  Tensor apply(const Tensor& x, Rng&) const override {
    Tensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = std::clamp(std::round(out[i] * 10.0) / 10.0, 0.0, 1.0);
    }
    return out;
  }
};

// Randomized defense that returns one of two fixed images; vote counts are
// then a pure function of the rng stream.
class CoinDefense final : public defenses::DefensePipeline {
 public:
  CoinDefense(Tensor heads, Tensor tails, double p)
      : heads_(std::move(heads)), tails_(std::move(tails)), p_(p) {}
  std::string name() const override { return "coin-test"; }
  bool differentiable() const override { return false; }
  bool randomized() const override { return true; }
  Tensor apply(const Tensor&, Rng& rng) const override {
    return rng.uniform() < p_ ? heads_ : tails_;
  }

 private:
  Tensor heads_;
  Tensor tails_;
  double p_;
};

models::Classifier test_classifier(std::size_t classes = 4) {
  Rng rng(100);
  return models::make_desk_classifier(models::InputSpec{1, 4, 4}, classes, rng);
}

// 8x8 classifier for tests that need wavelet-divisible inputs.
models::Classifier& clf8() {
  static models::Classifier clf = [] {
    Rng rng(101);
    return models::make_desk_classifier(models::InputSpec{1, 8, 8}, 4, rng);
  }();
  return clf;
}

Tensor plain_gradient(const models::Classifier& clf, const Tensor& x,
                      int label) {
  Tape tape;
  Var xv = tape.leaf(x);
  Var loss = tape.softmax_cross_entropy(clf.forward(tape, xv), label);
  return tape.backward(loss).grad(xv);
}

}  // namespace

TEST_CASE("project_linf") {
  SUBCASE("x_adv = x is unchanged") {
    Tensor x({3}, {0.1, 0.5, 0.9});
    CHECK(project_linf(x, x, 0.1) == x);
  }
  SUBCASE("epsilon 0 reduces to clip") {
    Tensor x({3}, {-0.2, 0.5, 1.3});
    Tensor adv({3}, {0.6, 0.6, 0.6});
    CHECK(project_linf(adv, x, 0.0) == Tensor({3}, {0.0, 0.5, 1.0}));
  }
  SUBCASE("paper budget 4/255") {
    Tensor x({1}, {0.5});
    Tensor adv({1}, {0.9});
    Tensor out = project_linf(adv, x, 4.0 / 255.0);
    CHECK(out[0] == doctest::Approx(0.5 + 4.0 / 255.0).epsilon(1e-12));
    CHECK(out[0] == doctest::Approx(0.515686).epsilon(1e-5));
  }
  SUBCASE("idempotent") {
    Rng rng(1);
    Tensor x = random_image({1, 4, 4}, rng);
    Tensor adv = random_image({1, 4, 4}, rng);
    Tensor once = project_linf(adv, x, 0.07);
    CHECK(project_linf(once, x, 0.07) == once);
  }
  SUBCASE("shape mismatch raises") {
    CHECK_THROWS_AS(project_linf(Tensor({3}), Tensor({4}), 0.1),
                    DimensionError);
  }
}

TEST_CASE("attack config validation") {
  AttackConfig config;
  SUBCASE("defaults are valid") { config.validate(); }
  SUBCASE("epsilon out of range") {
    config.epsilon = 1.5;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.epsilon = -0.1;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
  SUBCASE("targeted needs a target") {
    config.targeted = true;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.target = 3;
    config.validate();
  }
  SUBCASE("step size must be positive when iterating") {
    config.alpha = 0.0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.iterations = 0;
    config.validate();  // no steps, no step size needed
  }
  SUBCASE("gradient samples >= 1") {
    config.gradient_samples = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
  SUBCASE("default step size is epsilon/10") {
    config.epsilon = 0.1;
    CHECK(config.step_size() == doctest::Approx(0.01));
    config.alpha = 0.03;
    CHECK(config.step_size() == doctest::Approx(0.03));
  }
  SUBCASE("default sample count: 10 randomized, 1 deterministic") {
    defenses::IdentityDefense identity;
    defenses::PixelDeflectionConfig pd_config;
    defenses::PixelDeflectionDefense pd(pd_config);
    CHECK(config.samples_for(identity) == 1);
    CHECK(config.samples_for(pd) == 10);
    config.gradient_samples = 4;
    CHECK(config.samples_for(pd) == 4);
  }
}

TEST_CASE("pgd core with closed-form objectives") {
  SUBCASE("N=0 without random start returns x") {
    Rng rng(2);
    Tensor x = random_image({1, 4, 4}, rng);
    PgdOptions options{.epsilon = 0.1, .alpha = 0.01, .iterations = 0};
    Rng start_rng(3);
    PgdResult result = pgd_with_objective(
        x, [](const Tensor& p) { return ObjectiveEval{0.0, Tensor(p.shape())}; },
        options, start_rng);
    CHECK(result.best == x);
    CHECK(result.best_iteration == 0);
  }
  SUBCASE("sum objective: one step adds alpha elementwise") {
    Tensor x({4}, {0.2, 0.5, 0.96, 0.995});
    PgdOptions options{.epsilon = 0.01, .alpha = 0.004, .iterations = 1};
    Objective sum_objective = [](const Tensor& p) {
      double v = 0.0;
      for (double e : p.values()) v += e;
      return ObjectiveEval{v, Tensor::full(p.shape(), 1.0)};
    };
    Rng start_rng(4);
    PgdResult result =
        pgd_with_objective(x, sum_objective, options, start_rng);
    // Gradient sign is +1 everywhere; projection only bites at the 0.995
    // pixel via the [0,1] clip with epsilon 0.01.
    CHECK(result.best[0] == doctest::Approx(0.204).epsilon(1e-12));
    CHECK(result.best[1] == doctest::Approx(0.504).epsilon(1e-12));
    CHECK(result.best[2] == doctest::Approx(0.964).epsilon(1e-12));
    CHECK(result.best[3] == doctest::Approx(0.999).epsilon(1e-12));
  }
  SUBCASE("sign(0) = 0 freezes flat coordinates") {
    Tensor x({2}, {0.5, 0.5});
    PgdOptions options{.epsilon = 0.1, .alpha = 0.02, .iterations = 3};
    Objective half_flat = [](const Tensor& p) {
      Tensor g(p.shape());
      g[0] = 1.0;  // g[1] stays 0
      return ObjectiveEval{p[0], g};
    };
    Rng start_rng(5);
    PgdResult result = pgd_with_objective(x, half_flat, options, start_rng);
    CHECK(result.best[0] == doctest::Approx(0.56).epsilon(1e-12));
    CHECK(result.best[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("best iterate: max objective over the trace, monotone in N") {
    Rng rng(6);
    Tensor x = random_image({1, 4, 4}, rng);
    // Oscillating objective: the best iterate is typically not the last.
    Objective wavy = [](const Tensor& p) {
      double v = 0.0;
      for (double e : p.values()) v += std::sin(40.0 * e);
      Tensor g(p.shape());
      for (std::size_t i = 0; i < p.size(); ++i) {
        g[i] = 40.0 * std::cos(40.0 * p[i]);
      }
      return ObjectiveEval{v, g};
    };
    double previous_best = -1e300;
    for (int n : {2, 5, 9, 14}) {
      PgdOptions options{
          .epsilon = 0.2, .alpha = 0.03, .iterations = n, .random_start = true};
      Rng start_rng(7);  // same seed: same start, same trajectory prefix
      PgdResult result = pgd_with_objective(x, wavy, options, start_rng);
      REQUIRE(result.objective_trace.size() == static_cast<std::size_t>(n) + 1);
      double best = result.objective_trace[0];
      for (double v : result.objective_trace) best = std::max(best, v);
      CHECK(best == doctest::Approx(result.objective_trace[result.best_iteration])
                        .epsilon(1e-15));
      CHECK(best >= previous_best);
      previous_best = best;
    }
  }
}

TEST_CASE("bpda_gradient") {
  models::Classifier clf = test_classifier();
  Rng rng(8);
  Tensor x = random_image({1, 4, 4}, rng);

  SUBCASE("identity defense reproduces the plain gradient bit-for-bit") {
    defenses::IdentityDefense identity;
    Rng bpda_rng(9);
    BpdaGradient got = bpda_gradient(clf, identity, x, 2, 1, bpda_rng);
    CHECK(got.gradient == plain_gradient(clf, x, 2));
  }
  SUBCASE("quantisation defense: gradient taken at the defended point") {
    QuantizeDefense quantize;
    Rng bpda_rng(10);
    BpdaGradient got = bpda_gradient(clf, quantize, x, 2, 1, bpda_rng);
    Rng apply_rng(11);
    Tensor z = quantize.apply(x, apply_rng);
    CHECK(got.gradient == plain_gradient(clf, z, 2));
  }
  SUBCASE("deterministic for a fixed rng state") {
    defenses::PixelDeflectionConfig config;
    config.deflection_fraction = 0.05;
    config.wavelet_levels = 1;
    defenses::PixelDeflectionDefense pd(config);
    Tensor x8 = random_image({1, 8, 8}, rng);
    Rng a(12), b(12);
    BpdaGradient ga = bpda_gradient(clf8(), pd, x8, 1, 3, a);
    BpdaGradient gb = bpda_gradient(clf8(), pd, x8, 1, 3, b);
    CHECK(ga.gradient == gb.gradient);
    CHECK(ga.mean_loss == gb.mean_loss);
  }
  SUBCASE("m < 1 raises ConfigError") {
    defenses::IdentityDefense identity;
    Rng bpda_rng(13);
    CHECK_THROWS_AS(bpda_gradient(clf, identity, x, 0, 0, bpda_rng),
                    ConfigError);
  }
}

TEST_CASE("pgd end to end") {
  models::Classifier clf = test_classifier();
  Rng rng(14);
  Tensor x = random_image({1, 4, 4}, rng);
  const int y = clf.classify(x);

  SUBCASE("N=0 no random start: x_adv = x") {
    AttackConfig config;
    config.iterations = 0;
    config.random_start = false;
    defenses::IdentityDefense identity;
    AdversarialExample adv = pgd(clf, identity, x, y, config);
    CHECK(adv.adversarial == x);
    CHECK(adv.linf == 0.0);
    CHECK(adv.loss_trace.size() == 1);
  }
  SUBCASE("budget and range invariants hold after every attack") {
    AttackConfig config;
    config.epsilon = 0.1;
    config.iterations = 15;
    defenses::IdentityDefense identity;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      config.seed = seed;
      AdversarialExample adv = pgd(clf, identity, x, y, config);
      CHECK(linf_distance(adv.adversarial, x) <= config.epsilon + 1e-12);
      for (double v : adv.adversarial.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      CHECK(adv.linf == linf_distance(adv.adversarial, x));
    }
  }
  SUBCASE("targeted without a target raises") {
    AttackConfig config;
    config.targeted = true;
    defenses::IdentityDefense identity;
    CHECK_THROWS_AS(pgd(clf, identity, x, y, config), ConfigError);
  }
  SUBCASE("direct route through a non-differentiable defense raises") {
    AttackConfig config;
    config.route = GradientRoute::kDirect;
    config.iterations = 1;
    QuantizeDefense quantize;
    CHECK_THROWS_AS(pgd(clf, quantize, x, y, config), ContractError);
  }
  SUBCASE("identity defense: BPDA route replays the direct trajectory") {
    AttackConfig config;
    config.epsilon = 0.08;
    config.iterations = 12;
    defenses::IdentityDefense identity;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      config.seed = seed;
      std::vector<Tensor> direct_iterates;
      config.route = GradientRoute::kDirect;
      pgd(clf, identity, x, y, config,
          [&](int, const Tensor& t) { direct_iterates.push_back(t); });
      std::vector<Tensor> bpda_iterates;
      config.route = GradientRoute::kBpda;
      pgd(clf, identity, x, y, config,
          [&](int, const Tensor& t) { bpda_iterates.push_back(t); });
      REQUIRE(direct_iterates.size() == bpda_iterates.size());
      for (std::size_t i = 0; i < direct_iterates.size(); ++i) {
        CHECK(direct_iterates[i] == bpda_iterates[i]);
      }
    }
  }
  SUBCASE("deterministic: same config, same output") {
    AttackConfig config;
    config.epsilon = 0.1;
    config.iterations = 10;
    config.seed = 77;
    defenses::IdentityDefense identity;
    AdversarialExample a = pgd(clf, identity, x, y, config);
    AdversarialExample b = pgd(clf, identity, x, y, config);
    CHECK(a.adversarial == b.adversarial);
    CHECK(a.loss_trace == b.loss_trace);
    CHECK(a.best_iteration == b.best_iteration);
  }
  SUBCASE("targeted attack descends the target loss") {
    AttackConfig config;
    config.epsilon = 0.3;
    config.iterations = 30;
    config.targeted = true;
    config.target = (y + 1) % 4;
    config.seed = 5;
    defenses::IdentityDefense identity;
    AdversarialExample adv = pgd(clf, identity, x, y, config);
    auto ce_at = [&](const Tensor& p) {
      Tape t;
      Var loss = t.softmax_cross_entropy(clf.forward(t, t.leaf(p)),
                                         *config.target);
      return t.value(loss)[0];
    };
    CHECK(ce_at(adv.adversarial) < ce_at(x));
  }
}

TEST_CASE("attack_success") {
  models::Classifier clf = test_classifier();
  Rng rng(20);
  Tensor x = random_image({1, 4, 4}, rng);
  const int pred = clf.classify(x);

  SUBCASE("deterministic defense, prediction = target: 10/10 success") {
    defenses::IdentityDefense identity;
    Rng vote_rng(21);
    SuccessResult r =
        attack_success(clf, identity, x, (pred + 1) % 4, pred, 10, 9, vote_rng);
    CHECK(r.success);
    CHECK(r.votes == 10);
    CHECK(r.predictions == std::vector<int>(10, pred));
  }
  SUBCASE("threshold 9 rejects 8 of 10") {
    // Coin defense between an image classified as the target and one that is
    // not; search the seed space for a draw with exactly 8 target votes.
    Tensor other = random_image({1, 4, 4}, rng);
    int target = pred;
    int miss = clf.classify(other);
    REQUIRE(miss != target);  // seeds chosen so the two images disagree
    CoinDefense coin(x, other, 0.8);
    bool found = false;
    for (std::uint64_t seed = 0; seed < 500 && !found; ++seed) {
      Rng probe(seed);
      int votes = 0;
      for (int t = 0; t < 10; ++t) votes += probe.uniform() < 0.8 ? 1 : 0;
      if (votes != 8) continue;
      found = true;
      Rng vote_rng(seed);
      SuccessResult r =
          attack_success(clf, coin, x, miss, target, 10, 9, vote_rng);
      CHECK(r.votes == 8);
      CHECK_FALSE(r.success);
    }
    CHECK(found);
  }
  SUBCASE("trials=1 threshold=1, wrong prediction: failure") {
    defenses::IdentityDefense identity;
    Rng vote_rng(22);
    SuccessResult r = attack_success(clf, identity, x, pred, (pred + 1) % 4, 1,
                                     1, vote_rng);
    CHECK_FALSE(r.success);
    CHECK(r.votes == 0);
  }
  SUBCASE("untargeted counts votes different from y") {
    defenses::IdentityDefense identity;
    Rng vote_rng(23);
    SuccessResult r = attack_success(clf, identity, x, pred, std::nullopt, 10,
                                     9, vote_rng);
    CHECK_FALSE(r.success);  // prediction equals y, no vote differs
    CHECK(r.votes == 0);
    SuccessResult s = attack_success(clf, identity, x, (pred + 1) % 4,
                                     std::nullopt, 10, 9, vote_rng);
    CHECK(s.success);
    CHECK(s.votes == 10);
  }
  SUBCASE("invalid trials/threshold raise") {
    defenses::IdentityDefense identity;
    Rng vote_rng(24);
    CHECK_THROWS_AS(
        attack_success(clf, identity, x, 0, std::nullopt, 0, 0, vote_rng),
        ConfigError);
    CHECK_THROWS_AS(
        attack_success(clf, identity, x, 0, std::nullopt, 5, 6, vote_rng),
        ConfigError);
  }
}
