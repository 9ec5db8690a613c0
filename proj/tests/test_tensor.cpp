/**
 * Copyright 2026 The STDC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "gradient_checks.hpp"
#include "stdc/tensor.hpp"
#include "test_util.hpp"

namespace stdc {
namespace {

using testing::expect_error;
using testing::random_tensor;

TEST(Matmul, IdentityAndScalar) {
  Rng rng(1);
  const Tensor2 x = random_tensor(4, 3, rng);
  Tensor2 eye(4, 4);
  for (std::size_t i = 0; i < 4; ++i) eye(i, i) = 1.0;
  EXPECT_EQ(matmul(eye, x), x);
  EXPECT_EQ(matmul(Tensor2(1, 1, 2.0), Tensor2(1, 1, 3.0)), Tensor2(1, 1, 6.0));
  expect_error(ErrorCode::kShapeMismatch, [&] { matmul(x, x); });
}

TEST(Matmul, MatchesTripleLoop) {
  Rng rng(2);
  const Tensor2 a = random_tensor(4, 5, rng), b = random_tensor(5, 3, rng);
  const Tensor2 c = matmul(a, b);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 5; ++k) s += a(i, k) * b(k, j);
      EXPECT_NEAR(c(i, j), s, 1e-9);
    }
  // Transposed variants agree with explicit transposes.
  Tensor2 bt(3, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) bt(j, i) = b(i, j);
  const Tensor2 c2 = matmul_nt(a, bt);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c2.data()[i], c.data()[i], 1e-12);
  Tensor2 at(5, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) at(j, i) = a(i, j);
  Tensor2 c3(4, 3);
  add_matmul_tn(c3, at, b);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c3.data()[i], c.data()[i], 1e-12);
}

TEST(Adam, ZeroGradientZeroDecayIsNoOp) {
  Rng rng(3);
  testing::OneTensor p{random_tensor(3, 3, rng)};
  const auto before = p.t;
  testing::OneTensor g{Tensor2(3, 3)};
  AdamConfig cfg;
  cfg.weight_decay = 0.0;
  AdamState state(cfg, tensor_list(p));
  for (int i = 0; i < 5; ++i) adam_step(p, g, state);
  EXPECT_EQ(p.t, before);
  EXPECT_EQ(state.step, 5u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  for (double g : {1.0, 0.01, 250.0}) {
    testing::OneTensor p{Tensor2(1, 1, 0.5)};
    testing::OneTensor grad{Tensor2(1, 1, g)};
    AdamConfig cfg;
    cfg.weight_decay = 0.0;
    AdamState state(cfg, tensor_list(p));
    adam_step(p, grad, state);
    // Closed form after bias correction: -lr · g / (|g| + eps).
    EXPECT_NEAR(p.t(0, 0) - 0.5, -cfg.learning_rate * g / (std::abs(g) + cfg.epsilon), 1e-15);
    EXPECT_NEAR(p.t(0, 0) - 0.5, -cfg.learning_rate, 1e-6);
  }
}

TEST(Adam, DecoupledWeightDecayAppliedFirst) {
  testing::OneTensor p{Tensor2(1, 1, 2.0)};
  testing::OneTensor grad{Tensor2(1, 1, 0.0)};
  AdamState state(AdamConfig{}, tensor_list(p));
  adam_step(p, grad, state);
  EXPECT_DOUBLE_EQ(p.t(0, 0), 2.0 - 1e-4 * 1e-3 * 2.0);
}

TEST(Adam, DeterministicAndShapeChecked) {
  Rng rng(4);
  const Tensor2 init = random_tensor(2, 3, rng), g = random_tensor(2, 3, rng);
  testing::OneTensor a{init}, b{init}, ga{g};
  AdamState sa(AdamConfig{}, tensor_list(a)), sb(AdamConfig{}, tensor_list(b));
  for (int i = 0; i < 3; ++i) {
    adam_step(a, ga, sa);
    adam_step(b, ga, sb);
  }
  EXPECT_EQ(a.t, b.t);
  testing::OneTensor wrong{Tensor2(3, 2)};
  expect_error(ErrorCode::kShapeMismatch, [&] { adam_step(a, wrong, sa); });
}

TEST(Xent, UniformLogitsGiveLn2) {
  const std::vector<int> labels = {0, 1, 1};
  EXPECT_NEAR(xent_softmax(Tensor2(3, 2, 0.7), labels).loss, std::numbers::ln2, 1e-9);
}

TEST(Xent, LossFallsMonotonicallyWithGap) {
  const std::vector<int> labels = {0};
  double prev = std::numeric_limits<double>::infinity();
  for (double gap = 0.0; gap <= 30.0; gap += 2.0) {
    Tensor2 z(1, 2);
    z(0, 0) = gap;
    const double loss = xent_softmax(z, labels).loss;
    EXPECT_LT(loss, prev);
    EXPECT_GE(loss, 0.0);
    prev = loss;
  }
  EXPECT_LT(prev, 1e-12);
}

TEST(Xent, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) EXPECT_LT(testing::xent_gradient_error(seed), 1e-6);
}

TEST(Xent, Errors) {
  const std::vector<int> bad = {0, 2};
  expect_error(ErrorCode::kBadLabel, [&] { xent_softmax(Tensor2(2, 2), bad); });
  const std::vector<int> short_labels = {0};
  expect_error(ErrorCode::kShapeMismatch, [&] { xent_softmax(Tensor2(2, 2), short_labels); });
}

TEST(Glorot, BoundAndDeterminism) {
  Rng a(5), b(5);
  const Tensor2 w = glorot_uniform(30, 20, a);
  EXPECT_EQ(w, glorot_uniform(30, 20, b));
  const double bound = std::sqrt(6.0 / 50.0);
  double max_abs = 0.0;
  for (double v : w.data()) max_abs = std::max(max_abs, std::abs(v));
  EXPECT_LE(max_abs, bound);
  EXPECT_GT(max_abs, 0.8 * bound);
}

TEST(Batches, CoverEveryIndexOnce) {
  Rng rng(6);
  const auto batches = epoch_batches(70, 32, rng);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[2].size(), 6u);
  std::set<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  EXPECT_EQ(seen.size(), 70u);
}

TEST(Dense, ForwardBackwardShapes) {
  Rng rng(7);
  const Tensor2 x = random_tensor(5, 4, rng), w = random_tensor(3, 4, rng), b = random_tensor(1, 3, rng);
  const Tensor2 y = dense_forward(x, w, b);
  ASSERT_EQ(y.rows(), 5u);
  ASSERT_EQ(y.cols(), 3u);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = b(0, j);
      for (std::size_t k = 0; k < 4; ++k) s += x(i, k) * w(j, k);
      EXPECT_NEAR(y(i, j), s, 1e-12);
    }
  Tensor2 dw(3, 4), db(1, 3);
  const Tensor2 dx = dense_backward(x, w, Tensor2(5, 3, 1.0), dw, db);
  EXPECT_EQ(dx.rows(), 5u);
  EXPECT_DOUBLE_EQ(db(0, 0), 5.0);
}

TEST(Quantize, RoundsToFloat) {
  testing::OneTensor p{Tensor2(1, 2)};
  p.t(0, 0) = 0.1;
  p.t(0, 1) = 1.0 / 3.0;
  quantize_f32(p);
  EXPECT_EQ(p.t(0, 0), static_cast<double>(0.1f));
  EXPECT_EQ(p.t(0, 1), static_cast<double>(1.0f / 3.0f));
}

}  // namespace
}  // namespace stdc
