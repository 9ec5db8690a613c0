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

#include <algorithm>
#include <cmath>

#include "gradient_checks.hpp"
#include "stdc/fusion_stdc.hpp"
#include "test_util.hpp"

namespace stdc {
namespace {

using testing::expect_error;
using testing::random_tensor;

TEST(FitNorm, TwoVectorExample) {
  Tensor2 v(2, 256);
  for (std::size_t c = 0; c < 256; ++c) v(1, c) = 2.0;
  const auto s = fit_norm(v);
  for (std::size_t c = 0; c < 256; ++c) {
    EXPECT_DOUBLE_EQ(s.mean(0, c), 1.0);
    EXPECT_DOUBLE_EQ(s.std(0, c), 1.0);
  }
}

TEST(FitNorm, ConstantDimensionFloored) {
  Rng rng(1);
  Tensor2 v = random_tensor(5, 4, rng);
  for (std::size_t r = 0; r < 5; ++r) v(r, 2) = 3.25;
  const auto s = fit_norm(v);
  EXPECT_EQ(s.std(0, 2), kStdFloor);
  const auto z = normalize(v, s);
  for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(z(r, 2), 0.0);
}

TEST(FitNorm, RandomBatchIsStandardized) {
  Rng rng(2);
  Tensor2 v = random_tensor(50, 256, rng, 7.0);
  for (std::size_t r = 0; r < 50; ++r)
    for (std::size_t c = 0; c < 256; ++c) v(r, c) += static_cast<double>(c);
  const auto z = normalize(v, fit_norm(v));
  for (std::size_t c = 0; c < 256; ++c) {
    double mean = 0.0, var = 0.0;
    for (std::size_t r = 0; r < 50; ++r) mean += z(r, c);
    mean /= 50.0;
    for (std::size_t r = 0; r < 50; ++r) var += (z(r, c) - mean) * (z(r, c) - mean);
    EXPECT_LT(std::abs(mean), 1e-9);
    EXPECT_NEAR(std::sqrt(var / 50.0), 1.0, 1e-9);
  }
}

TEST(FitNorm, RoundTripIdentity) {
  Rng rng(3);
  const Tensor2 v = random_tensor(20, 16, rng, 4.0);
  const auto s = fit_norm(v);
  const Tensor2 back = denormalize(normalize(v, s), s);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(back.data()[i], v.data()[i], 1e-9);
}

TEST(FitNorm, Errors) {
  expect_error(ErrorCode::kTooFewVectors, [] { fit_norm(Tensor2(1, 256)); });
  expect_error(ErrorCode::kStatsNotFitted, [] { normalize(Tensor2(1, 4), NormStats{}); });
  const auto s = NormStats::shaped(4);
  expect_error(ErrorCode::kShapeMismatch, [&] { slice_stats(s, 2, 3); });
}

TEST(SliceStats, TakesContiguousColumns) {
  Rng rng(4);
  const auto s = fit_norm(random_tensor(6, 10, rng));
  const auto t = slice_stats(s, 3, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(t.mean(0, c), s.mean(0, 3 + c));
    EXPECT_EQ(t.std(0, c), s.std(0, 3 + c));
  }
}

SdcVector random_sdc(Rng& rng) {
  std::vector<double> v(kFeatureDim);
  for (double& x : v) x = rng.normal();
  return SdcVector(v);
}

StcVector random_stc(Rng& rng) {
  std::vector<double> v(kFeatureDim);
  for (double& x : v) x = rng.normal();
  return StcVector(v);
}

TEST(EncodeStdc, ZeroEncoderGivesZeroCode) {
  auto p = AutoencoderParams::init(1);
  p.for_each_tensor([](const std::string&, Tensor2& t) { t = Tensor2(t.rows(), t.cols()); });
  Rng rng(5);
  Tensor2 batch = random_tensor(4, kFusedDim, rng);
  const auto stats = fit_norm(batch);
  const auto code = encode_stdc(random_sdc(rng), random_stc(rng), stats, p);
  ASSERT_EQ(code.values().size(), 128u);
  for (double v : code.values()) EXPECT_EQ(v, 0.0);
}

TEST(EncodeStdc, ShapeAndDeterminism) {
  Rng rng(6);
  const auto p = AutoencoderParams::init(2);
  const auto stats = fit_norm(random_tensor(8, kFusedDim, rng));
  const auto sdc = random_sdc(rng);
  const auto stc = random_stc(rng);
  const auto a = encode_stdc(sdc, stc, stats, p);
  EXPECT_EQ(a.values().size(), 128u);
  EXPECT_EQ(a, encode_stdc(sdc, stc, stats, p));
  for (double v : a.values()) EXPECT_TRUE(std::isfinite(v));
  expect_error(ErrorCode::kStatsNotFitted, [&] { encode_stdc(sdc, stc, NormStats{}, p); });
}

TEST(EncodeStdc, CodeIsBottleneckNotReconstruction) {
  Rng rng(7);
  const auto p = AutoencoderParams::init(3);
  const Tensor2 batch = random_tensor(6, kFusedDim, rng);
  const auto stats = fit_norm(batch);
  const auto sdc = random_sdc(rng);
  const auto stc = random_stc(rng);
  const Tensor2 x = normalize(Tensor2(1, kFusedDim, fuse(sdc, stc)), stats);
  const auto code = encode_stdc(sdc, stc, stats, p);
  const auto expected = autoencoder_forward(x, p).code.data();
  EXPECT_TRUE(std::equal(code.values().begin(), code.values().end(), expected.begin(), expected.end()));
}

TEST(Autoencoder, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    EXPECT_LT(testing::autoencoder_gradient_error(seed), testing::kGradientTolerance);
}

TEST(Autoencoder, TwoHundredStepsReduceLoss) {
  Rng rng(8);
  const Tensor2 data = random_tensor(100, kFusedDim, rng);
  auto p = AutoencoderParams::init(4);
  const double before = reconstruction_loss(data, p);
  AdamState adam(AdamConfig{}, tensor_list(p));
  Rng order(9);
  std::size_t steps = 0;
  while (steps < 200)
    for (const auto& batch : epoch_batches(100, 32, order)) {
      if (steps++ == 200) break;
      auto g = zeros_like(p);
      reconstruction_loss_and_grad(gather_rows(data, batch), p, g);
      adam_step(p, g, adam);
    }
  EXPECT_LT(reconstruction_loss(data, p), before);
}

TEST(Autoencoder, IdenticalVectorsAreLearned) {
  Rng rng(10);
  // 1000 rows give ~1600 Adam steps over the 50 epochs at the fixed learning rate.
  Tensor2 data(1000, kFusedDim);
  std::vector<double> v(kFusedDim);
  double norm2 = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm2 += x * x;
  }
  for (std::size_t r = 0; r < 1000; ++r)
    for (std::size_t c = 0; c < kFusedDim; ++c) data(r, c) = v[c];
  std::vector<double> losses;
  const auto p = train_autoencoder(data, AutoencoderParams::init(5), 6, {}, &losses);
  ASSERT_EQ(losses.size(), 51u);
  EXPECT_LT(losses.back(), losses.front());
  // Per-entry MSE times the width is the squared error of the whole vector.
  EXPECT_LT(reconstruction_loss(Tensor2(1, kFusedDim, v), p) * kFusedDim, 1e-2 * norm2);
}

TEST(Autoencoder, TrainingDeterministicAndLossFalls) {
  Rng rng(11);
  const Tensor2 data = random_tensor(40, kFusedDim, rng);
  TrainOptions opt;
  opt.epochs = 5;
  std::vector<double> losses;
  const auto a = train_autoencoder(data, AutoencoderParams::init(7), 8, opt, &losses);
  const auto b = train_autoencoder(data, AutoencoderParams::init(7), 8, opt);
  EXPECT_TRUE(a.enc_hidden_w == b.enc_hidden_w && a.dec_out_b == b.dec_out_b);
  EXPECT_LT(losses.back(), losses.front());
  expect_error(ErrorCode::kEmptyTrainingSet,
               [] { train_autoencoder(Tensor2(0, kFusedDim), AutoencoderParams::init(1), 1); });
}

}  // namespace
}  // namespace stdc
