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
#include "gauntlet/errors.hpp"
#include "gauntlet/rng.hpp"
#include "gauntlet/tape.hpp"
#include "gauntlet/tensor.hpp"
#include "oracles.hpp"

using namespace gauntlet;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("tensor basics") {
  SUBCASE("shape/data invariant") {
    Tensor t({2, 3});
    CHECK(t.size() == 6);
    CHECK(t.rank() == 2);
    CHECK_THROWS_AS(Tensor({2, 3}, {1.0, 2.0}), DimensionError);
  }
  SUBCASE("argmax lowest index wins ties") {
    CHECK(argmax(Tensor({4}, {1.0, 3.0, 3.0, 2.0})) == 1);
    CHECK(argmax(Tensor({3}, {0.0, 0.0, 0.0})) == 0);
  }
  SUBCASE("linf distance") {
    Tensor a({3}, {0.0, 0.5, 1.0});
    Tensor b({3}, {0.1, 0.5, 0.7});
    CHECK(linf_distance(a, b) == doctest::Approx(0.3));
  }
  SUBCASE("require_finite raises NumericError") {
    Tensor t({1}, {std::nan("")});
    CHECK_THROWS_AS(t.require_finite("test"), NumericError);
  }
}

TEST_CASE("matmul") {
  Tape tape;
  SUBCASE("identity case") {
    Var a = tape.leaf(Tensor({2, 2}, {1, 0, 0, 1}));
    Var b = tape.leaf(Tensor({2, 2}, {3, 4, 5, 6}));
    CHECK(tape.value(tape.matmul(a, b)) == Tensor({2, 2}, {3, 4, 5, 6}));
  }
  SUBCASE("2x2 worked example") {
    Var a = tape.leaf(Tensor({2, 2}, {1, 2, 3, 4}));
    Var b = tape.leaf(Tensor({2, 2}, {5, 6, 7, 8}));
    Tensor got = tape.value(tape.matmul(a, b));
    CHECK(got == Tensor({2, 2}, {19, 22, 43, 50}));
    CHECK(got == oracles::matmul(tape.value(a), tape.value(b)));
  }
  SUBCASE("mismatched inner dims name both shapes") {
    Var a = tape.leaf(Tensor({2, 3}));
    Var b = tape.leaf(Tensor({2, 3}));
    CHECK_THROWS_WITH_AS(tape.matmul(a, b),
                         doctest::Contains("[2x3]"), DimensionError);
  }
  SUBCASE("random shapes agree with the triple-loop oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t m = rng.uniform_index(6) + 1;
      const std::size_t k = rng.uniform_index(6) + 1;
      const std::size_t n = rng.uniform_index(6) + 1;
      Tensor a = random_tensor({m, k}, rng);
      Tensor b = random_tensor({k, n}, rng);
      Tape t;
      Tensor got = t.value(t.matmul(t.leaf(a), t.leaf(b)));
      Tensor want = oracles::matmul(a, b);
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("conv2d") {
  Tape tape;
  SUBCASE("1x1 identity kernel") {
    Tensor x({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    Var out = tape.conv2d(tape.leaf(x), tape.leaf(Tensor({1, 1, 1, 1}, {1})), 0);
    CHECK(tape.value(out) == x);
  }
  SUBCASE("all-zero kernel annihilates") {
    Tensor x({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    Var out = tape.conv2d(tape.leaf(x), tape.leaf(Tensor({1, 1, 3, 3})), 1);
    for (double v : tape.value(out).values()) CHECK(v == 0.0);
  }
  SUBCASE("2x2 kernel worked example") {
    // 1..9 against [[1,0],[0,1]]: each output pixel sums the NW and SE
    // corners of its window.
    Tensor x({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    Tensor k({1, 1, 2, 2}, {1, 0, 0, 1});
    Tensor got = tape.value(tape.conv2d(tape.leaf(x), tape.leaf(k), 0));
    CHECK(got == Tensor({1, 2, 2}, {6, 8, 12, 14}));
    CHECK(got == oracles::conv2d(x, k, 0));
  }
  SUBCASE("non-positive output dims raise") {
    Var x = tape.leaf(Tensor({1, 2, 2}));
    Var k = tape.leaf(Tensor({1, 1, 5, 5}));
    CHECK_THROWS_AS(tape.conv2d(x, k, 0), DimensionError);
  }
  SUBCASE("channel mismatch raises") {
    Var x = tape.leaf(Tensor({2, 4, 4}));
    Var k = tape.leaf(Tensor({1, 3, 3, 3}));
    CHECK_THROWS_AS(tape.conv2d(x, k, 1), DimensionError);
  }
  SUBCASE("random configs agree with the sliding-window oracle") {
    Rng rng(12);
    for (int trial = 0; trial < 12; ++trial) {
      const std::size_t cin = rng.uniform_index(3) + 1;
      const std::size_t cout = rng.uniform_index(3) + 1;
      const std::size_t hw = rng.uniform_index(5) + 4;
      const std::size_t k = 2 * rng.uniform_index(2) + 1;  // 1 or 3
      const int pad = static_cast<int>(rng.uniform_index(2));
      Tensor x = random_tensor({cin, hw, hw}, rng);
      Tensor kern = random_tensor({cout, cin, k, k}, rng);
      Tape t;
      Tensor got = t.value(t.conv2d(t.leaf(x), t.leaf(kern), pad));
      Tensor want = oracles::conv2d(x, kern, pad);
      REQUIRE(got.shape() == want.shape());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("relu") {
  Tape tape;
  SUBCASE("definition") {
    Var out = tape.relu(tape.leaf(Tensor({3}, {-1, 0, 2})));
    CHECK(tape.value(out) == Tensor({3}, {0, 0, 2}));
  }
  SUBCASE("all-negative input") {
    Var out = tape.relu(tape.leaf(Tensor({4}, {-3, -2, -1, -0.5})));
    for (double v : tape.value(out).values()) CHECK(v == 0.0);
  }
  SUBCASE("subgradient at 0 is 0") {
    Var x = tape.leaf(Tensor({2}, {-1, 2}));
    Var loss = tape.sum(tape.relu(x));
    Gradients grads = tape.backward(loss);
    CHECK(grads.grad(x) == Tensor({2}, {0, 1}));

    Tape t2;
    Var x2 = t2.leaf(Tensor({1}, {0.0}));
    Gradients g2 = t2.backward(t2.sum(t2.relu(x2)));
    CHECK(g2.grad(x2)[0] == 0.0);
  }
}

TEST_CASE("softmax cross entropy") {
  SUBCASE("uniform logits give ln C") {
    Tape tape;
    Var logits = tape.leaf(Tensor({10}));
    for (int label = 0; label < 10; ++label) {
      Var loss = tape.softmax_cross_entropy(logits, label);
      CHECK(tape.value(loss)[0] == doctest::Approx(std::log(10.0)).epsilon(1e-12));
    }
  }
  SUBCASE("saturated case is ~0") {
    Tape tape;
    Var loss = tape.softmax_cross_entropy(
        tape.leaf(Tensor({2}, {1000.0, 0.0})), 0);
    CHECK(tape.value(loss)[0] == doctest::Approx(0.0).epsilon(1e-9));
    // Without log-sum-exp stabilization this would overflow, not just lose
    // precision.
    CHECK(std::isfinite(tape.value(loss)[0]));
  }
  SUBCASE("worked example matches the high-precision oracle") {
    Tape tape;
    Var loss = tape.softmax_cross_entropy(tape.leaf(Tensor({3}, {1, 2, 3})), 1);
    CHECK(tape.value(loss)[0] == doctest::Approx(1.407606).epsilon(1e-6));
    CHECK(tape.value(loss)[0] ==
          doctest::Approx(oracles::cross_entropy({1, 2, 3}, 1)).epsilon(1e-12));
  }
  SUBCASE("label out of range") {
    Tape tape;
    Var logits = tape.leaf(Tensor({3}));
    CHECK_THROWS_AS(tape.softmax_cross_entropy(logits, 3), IndexError);
    CHECK_THROWS_AS(tape.softmax_cross_entropy(logits, -1), IndexError);
  }
  SUBCASE("non-negative, zero only in the one-hot limit") {
    Rng rng(13);
    Tape tape;
    for (int trial = 0; trial < 50; ++trial) {
      Tensor logits = random_tensor({5}, rng, -4.0, 4.0);
      Var loss = tape.softmax_cross_entropy(
          tape.leaf(logits), static_cast<int>(rng.uniform_index(5)));
      CHECK(tape.value(loss)[0] > 0.0);  // finite logits never reach 0
    }
  }
  SUBCASE("gradient is softmax minus onehot") {
    Tape tape;
    Tensor logits({3}, {1, 2, 3});
    Var lv = tape.leaf(logits);
    Gradients grads = tape.backward(tape.softmax_cross_entropy(lv, 1));
    double denom = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
    Tensor grad = grads.grad(lv);
    CHECK(grad[0] == doctest::Approx(std::exp(1.0) / denom).epsilon(1e-12));
    CHECK(grad[1] == doctest::Approx(std::exp(2.0) / denom - 1.0).epsilon(1e-12));
    CHECK(grad[2] == doctest::Approx(std::exp(3.0) / denom).epsilon(1e-12));
  }
}

TEST_CASE("backward") {
  SUBCASE("d(x*x)/dx = 2x") {
    Tape tape;
    Var x = tape.leaf(Tensor({1}, {3.0}));
    Gradients grads = tape.backward(tape.sum(tape.mul(x, x)));
    CHECK(grads.grad(x) == Tensor({1}, {6.0}));
  }
  SUBCASE("sum(matmul(x, W)) matches finite differences") {
    Rng rng(14);
    Tensor x = random_tensor({2, 3}, rng);
    Tensor w = random_tensor({3, 4}, rng);
    Tape tape;
    Var xv = tape.leaf(x);
    Gradients grads =
        tape.backward(tape.sum(tape.matmul(xv, tape.leaf(w))));
    Tensor fd = oracles::central_diff(
        [&](const Tensor& p) {
          Tape t;
          return t.value(t.sum(t.matmul(t.leaf(p), t.leaf(w))))[0];
        },
        x);
    CHECK(oracles::max_relative_error(grads.grad(xv), fd) < 1e-6);
  }
  SUBCASE("constant loss gives zero gradient") {
    Tape tape;
    Var x = tape.leaf(Tensor({3}, {1, 2, 3}));
    Var c = tape.leaf(Tensor({1}, {7.0}));
    Gradients grads = tape.backward(tape.sum(c));
    CHECK(grads.grad(x) == Tensor({3}));
  }
  SUBCASE("non-scalar loss raises ContractError") {
    Tape tape;
    Var x = tape.leaf(Tensor({3}, {1, 2, 3}));
    CHECK_THROWS_AS(tape.backward(x), ContractError);
  }
  SUBCASE("deterministic: identical inputs, bit-identical gradients") {
    auto run = [] {
      Tape tape;
      Var x = tape.leaf(Tensor({4}, {0.1, -0.2, 0.3, -0.4}));
      Var y = tape.relu(tape.scale(x, 2.5));
      return tape.backward(tape.sum(tape.mul(y, y))).grad(x);
    };
    CHECK(run() == run());
  }
}

TEST_CASE("gradient check across random composites") {
  // Small instance of acceptance criterion 1: random chains of traced ops,
  // reverse-mode vs central differences, kink points skipped.
  Rng rng(15);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Tensor x = random_tensor({2, 4, 4}, rng, 0.05, 0.95);
    Tensor k = random_tensor({2, 2, 3, 3}, rng, -0.6, 0.6);
    Tensor w = random_tensor({32, 3}, rng, -0.6, 0.6);
    const int label = static_cast<int>(rng.uniform_index(3));

    auto value_and_margin = [&](const Tensor& p, Var* leaf_out,
                                Tape* tape) -> Var {
      Var xv = tape->leaf(p);
      if (leaf_out) *leaf_out = xv;
      Var h = tape->conv2d(xv, tape->leaf(k), 1);
      h = tape->relu(h);
      h = tape->reshape(h, {1, 32});
      h = tape->reshape(tape->matmul(h, tape->leaf(w)), {3});
      return tape->softmax_cross_entropy(h, label);
    };

    Tape tape;
    Var leaf;
    Var loss = value_and_margin(x, &leaf, &tape);
    if (tape.kink_margin() < 1e-4) continue;  // avoid relu kinks
    Tensor grad = tape.backward(loss).grad(leaf);
    Tensor fd = oracles::central_diff(
        [&](const Tensor& p) {
          Tape t;
          return t.value(value_and_margin(p, nullptr, &t))[0];
        },
        x);
    CHECK(oracles::max_relative_error(grad, fd) < 1e-5);
    ++checked;
  }
  CHECK(checked > 20);  // kink skipping must not hollow the test out
}
