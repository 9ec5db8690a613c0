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
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stdc/features.hpp"
#include "stdc/tensor.hpp"

namespace stdc {

inline constexpr double kStdFloor = 1e-6;
inline constexpr std::size_t kFusedDim = 2 * kFeatureDim;

/// Per-dimension z-score statistics of the fused (SDC ++ STC) vectors.
struct NormStats {
  Tensor2 mean;  // 1 x D
  Tensor2 std;   // 1 x D

  bool fitted() const noexcept { return mean.cols() > 0; }
  std::size_t dim() const noexcept { return mean.cols(); }

  template <typename F>
  void for_each_tensor(F&& f) {
    f("norm.mean", mean);
    f("norm.std", std);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    f("norm.mean", mean);
    f("norm.std", std);
  }

  /// Empty stats of a given width, for loading from a container.
  static NormStats shaped(std::size_t dim) { return {Tensor2(1, dim), Tensor2(1, dim)}; }
};

/// Population mean and standard deviation per column, std floored at 1e-6.
inline NormStats fit_norm(const Tensor2& vectors) {
  require(vectors.rows() >= 2, ErrorCode::kTooFewVectors,
          "normalization needs at least 2 vectors, got " + std::to_string(vectors.rows()));
  const std::size_t n = vectors.rows(), d = vectors.cols();
  NormStats s = NormStats::shaped(d);
  for (std::size_t c = 0; c < d; ++c) {
    const double first = vectors(0, c);
    bool constant = true;
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      sum += vectors(r, c);
      constant = constant && vectors(r, c) == first;
    }
    if (constant) {
      // Exact mean so normalized values are exactly zero.
      s.mean(0, c) = first;
      s.std(0, c) = kStdFloor;
      continue;
    }
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dv = vectors(r, c) - mean;
      var += dv * dv;
    }
    s.mean(0, c) = mean;
    s.std(0, c) = std::max(std::sqrt(var / static_cast<double>(n)), kStdFloor);
  }
  return s;
}

inline Tensor2 normalize(const Tensor2& vectors, const NormStats& stats) {
  require(stats.fitted(), ErrorCode::kStatsNotFitted, "normalization statistics not fitted");
  require(vectors.cols() == stats.dim(), ErrorCode::kShapeMismatch, "normalization width");
  Tensor2 out = vectors;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) = (out(r, c) - stats.mean(0, c)) / stats.std(0, c);
  return out;
}

inline Tensor2 denormalize(const Tensor2& vectors, const NormStats& stats) {
  require(stats.fitted(), ErrorCode::kStatsNotFitted, "normalization statistics not fitted");
  require(vectors.cols() == stats.dim(), ErrorCode::kShapeMismatch, "normalization width");
  Tensor2 out = vectors;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) = out(r, c) * stats.std(0, c) + stats.mean(0, c);
  return out;
}

/// Restriction of the stats to columns [begin, begin + width).
inline NormStats slice_stats(const NormStats& stats, std::size_t begin, std::size_t width) {
  require(begin + width <= stats.dim(), ErrorCode::kShapeMismatch, "stats slice out of range");
  NormStats out = NormStats::shaped(width);
  for (std::size_t c = 0; c < width; ++c) {
    out.mean(0, c) = stats.mean(0, begin + c);
    out.std(0, c) = stats.std(0, begin + c);
  }
  return out;
}

/// input -> hidden (relu) -> code (linear) -> hidden (relu) -> input (linear).
struct AutoencoderParams {
  Tensor2 enc_hidden_w, enc_hidden_b;
  Tensor2 enc_code_w, enc_code_b;
  Tensor2 dec_hidden_w, dec_hidden_b;
  Tensor2 dec_out_w, dec_out_b;

  std::size_t input_dim() const noexcept { return enc_hidden_w.cols(); }
  std::size_t code_dim() const noexcept { return enc_code_w.rows(); }

  static AutoencoderParams init(std::uint64_t seed, std::size_t input_dim = kFusedDim,
                                std::size_t hidden = 192, std::size_t code = kFeatureDim) {
    Rng rng(seed);
    AutoencoderParams p;
    p.enc_hidden_w = glorot_uniform(hidden, input_dim, rng);
    p.enc_hidden_b = Tensor2(1, hidden);
    p.enc_code_w = glorot_uniform(code, hidden, rng);
    p.enc_code_b = Tensor2(1, code);
    p.dec_hidden_w = glorot_uniform(hidden, code, rng);
    p.dec_hidden_b = Tensor2(1, hidden);
    p.dec_out_w = glorot_uniform(input_dim, hidden, rng);
    p.dec_out_b = Tensor2(1, input_dim);
    return p;
  }

  template <typename F>
  void for_each_tensor(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    visit(*this, f);
  }

 private:
  template <typename Self, typename F>
  static void visit(Self& s, F& f) {
    f("ae.enc_hidden.weight", s.enc_hidden_w);
    f("ae.enc_hidden.bias", s.enc_hidden_b);
    f("ae.enc_code.weight", s.enc_code_w);
    f("ae.enc_code.bias", s.enc_code_b);
    f("ae.dec_hidden.weight", s.dec_hidden_w);
    f("ae.dec_hidden.bias", s.dec_hidden_b);
    f("ae.dec_out.weight", s.dec_out_w);
    f("ae.dec_out.bias", s.dec_out_b);
  }
};

struct AutoencoderPass {
  Tensor2 pre_hidden, code, pre_dec_hidden, output;
};

inline Tensor2 encode(const Tensor2& x, const AutoencoderParams& p,
                      AutoencoderPass* pass = nullptr) {
  Tensor2 pre = dense_forward(x, p.enc_hidden_w, p.enc_hidden_b);
  Tensor2 code = dense_forward(relu(pre), p.enc_code_w, p.enc_code_b);
  if (pass) pass->pre_hidden = std::move(pre);
  return code;
}

inline AutoencoderPass autoencoder_forward(const Tensor2& x, const AutoencoderParams& p) {
  AutoencoderPass pass;
  pass.code = encode(x, p, &pass);
  pass.pre_dec_hidden = dense_forward(pass.code, p.dec_hidden_w, p.dec_hidden_b);
  pass.output = dense_forward(relu(pass.pre_dec_hidden), p.dec_out_w, p.dec_out_b);
  return pass;
}

/// Mean squared error over every entry of the batch.
inline double reconstruction_loss(const Tensor2& x, const AutoencoderParams& p) {
  const auto pass = autoencoder_forward(x, p);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = pass.output.data()[i] - x.data()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(x.size());
}

/// Loss plus accumulated gradients for one batch.
inline double reconstruction_loss_and_grad(const Tensor2& x, const AutoencoderParams& p,
                                           AutoencoderParams& grads) {
  const auto pass = autoencoder_forward(x, p);
  const double scale = 1.0 / static_cast<double>(x.size());
  Tensor2 dy(x.rows(), x.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = pass.output.data()[i] - x.data()[i];
    sum += d * d;
    dy.data()[i] = 2.0 * d * scale;
  }
  Tensor2 d_dec_hidden = relu_backward(
      dense_backward(relu(pass.pre_dec_hidden), p.dec_out_w, dy, grads.dec_out_w, grads.dec_out_b),
      pass.pre_dec_hidden);
  Tensor2 d_code =
      dense_backward(pass.code, p.dec_hidden_w, d_dec_hidden, grads.dec_hidden_w, grads.dec_hidden_b);
  Tensor2 d_hidden = relu_backward(
      dense_backward(relu(pass.pre_hidden), p.enc_code_w, d_code, grads.enc_code_w, grads.enc_code_b),
      pass.pre_hidden);
  dense_backward(x, p.enc_hidden_w, d_hidden, grads.enc_hidden_w, grads.enc_hidden_b);
  return sum * scale;
}

/// Minibatch Adam on mean squared reconstruction error. `epoch_loss`, when
/// given, receives the full-set loss before training and after every epoch.
inline AutoencoderParams train_autoencoder(const Tensor2& vectors, AutoencoderParams params,
                                           std::uint64_t seed, const TrainOptions& options = {},
                                           std::vector<double>* epoch_loss = nullptr) {
  require(vectors.rows() > 0, ErrorCode::kEmptyTrainingSet, "no vectors to train on");
  require(vectors.cols() == params.input_dim(), ErrorCode::kShapeMismatch,
          "autoencoder input width");
  Rng rng(seed);
  auto tensors = tensor_list(params);
  AdamState adam(options.adam, tensors);
  if (epoch_loss) epoch_loss->push_back(reconstruction_loss(vectors, params));
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& batch : epoch_batches(vectors.rows(), options.batch_size, rng)) {
      AutoencoderParams grads = zeros_like(params);
      reconstruction_loss_and_grad(gather_rows(vectors, batch), params, grads);
      adam_step(params, grads, adam);
    }
    if (epoch_loss) epoch_loss->push_back(reconstruction_loss(vectors, params));
  }
  return params;
}

inline std::vector<double> fuse(const SdcVector& sdc, const StcVector& stc) {
  std::vector<double> v(kFusedDim);
  std::copy(sdc.values().begin(), sdc.values().end(), v.begin());
  std::copy(stc.values().begin(), stc.values().end(), v.begin() + kFeatureDim);
  return v;
}

/// z-normalize SDC ++ STC and return the autoencoder bottleneck.
inline StdcVector encode_stdc(const SdcVector& sdc, const StcVector& stc, const NormStats& stats,
                              const AutoencoderParams& params) {
  require(stats.fitted(), ErrorCode::kStatsNotFitted, "normalization statistics not fitted");
  require(params.code_dim() == kFeatureDim, ErrorCode::kShapeMismatch,
          "autoencoder bottleneck must be 128-D");
  const Tensor2 x = normalize(Tensor2(1, kFusedDim, fuse(sdc, stc)), stats);
  const Tensor2 code = encode(x, params);
  return StdcVector(code.data());
}

}  // namespace stdc
