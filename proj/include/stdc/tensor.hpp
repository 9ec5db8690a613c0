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
#include <string>
#include <utility>
#include <vector>

#include "stdc/grid.hpp"
#include "stdc/random.hpp"

namespace stdc {

/// Dense row-major real matrix used by every trainable stage.
using Tensor2 = Grid<double>;

inline void check_same_shape(const Tensor2& a, const Tensor2& b, const char* what) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeMismatch,
          std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
              " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

/// a · b
inline Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  require(a.cols() == b.rows(), ErrorCode::kShapeMismatch,
          "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
              std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  Tensor2 out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto o = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      if (s == 0.0) continue;
      const auto br = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) o[j] += s * br[j];
    }
  }
  return out;
}

/// a · bᵀ
inline Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b) {
  require(a.cols() == b.cols(), ErrorCode::kShapeMismatch, "matmul_nt: inner dimensions differ");
  Tensor2 out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ar = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto br = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < ar.size(); ++k) acc += ar[k] * br[k];
      out(i, j) = acc;
    }
  }
  return out;
}

/// out += aᵀ · b
inline void add_matmul_tn(Tensor2& out, const Tensor2& a, const Tensor2& b) {
  require(a.rows() == b.rows() && out.rows() == a.cols() && out.cols() == b.cols(),
          ErrorCode::kShapeMismatch, "matmul_tn: shapes differ");
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto br = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = a(r, i);
      if (s == 0.0) continue;
      auto o = out.row(i);
      for (std::size_t j = 0; j < br.size(); ++j) o[j] += s * br[j];
    }
  }
}

/// Adds a 1 x cols bias to every row.
inline void add_row_bias(Tensor2& x, const Tensor2& bias) {
  require(bias.rows() == 1 && bias.cols() == x.cols(), ErrorCode::kShapeMismatch,
          "bias shape does not match");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias(0, c);
  }
}

/// out(0, c) += Σ_r x(r, c)
inline void add_col_sums(Tensor2& out, const Tensor2& x) {
  require(out.rows() == 1 && out.cols() == x.cols(), ErrorCode::kShapeMismatch,
          "column-sum target shape does not match");
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) += x(r, c);
}

/// x · Wᵀ + b, the affine map used by every dense layer (W is out x in).
inline Tensor2 dense_forward(const Tensor2& x, const Tensor2& weight, const Tensor2& bias) {
  Tensor2 y = matmul_nt(x, weight);
  add_row_bias(y, bias);
  return y;
}

/// Accumulates weight/bias gradients of a dense layer and returns dx.
inline Tensor2 dense_backward(const Tensor2& x, const Tensor2& weight, const Tensor2& dy,
                              Tensor2& dweight, Tensor2& dbias) {
  add_matmul_tn(dweight, dy, x);
  add_col_sums(dbias, dy);
  return matmul(dy, weight);
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Tensor2 relu(Tensor2 x) {
  for (double& v : x.data()) v = v > 0.0 ? v : 0.0;
  return x;
}

/// Zeroes dy where the pre-activation was not positive.
inline Tensor2 relu_backward(Tensor2 dy, const Tensor2& pre) {
  check_same_shape(dy, pre, "relu_backward");
  for (std::size_t i = 0; i < dy.size(); ++i)
    if (pre.data()[i] <= 0.0) dy.data()[i] = 0.0;
  return dy;
}

struct LossAndGrad {
  double loss = 0.0;
  Tensor2 grad;
};

/// Mean softmax cross-entropy over the batch; gradient is
/// (softmax - onehot) / batch.
inline LossAndGrad xent_softmax(const Tensor2& logits, std::span<const int> labels) {
  require(labels.size() == logits.rows(), ErrorCode::kShapeMismatch,
          "label count does not match batch size");
  require(logits.rows() > 0, ErrorCode::kEmptyTrainingSet, "empty batch");
  const std::size_t classes = logits.cols();
  LossAndGrad out{0.0, Tensor2(logits.rows(), classes)};
  const double inv_batch = 1.0 / static_cast<double>(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const int label = labels[r];
    require(label >= 0 && static_cast<std::size_t>(label) < classes, ErrorCode::kBadLabel,
            "label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
    const auto z = logits.row(r);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (double v : z) denom += std::exp(v - zmax);
    const double log_denom = std::log(denom);
    out.loss += -(z[static_cast<std::size_t>(label)] - zmax - log_denom);
    for (std::size_t c = 0; c < classes; ++c) {
      const double p = std::exp(z[c] - zmax - log_denom);
      out.grad(r, c) = (p - (static_cast<int>(c) == label ? 1.0 : 0.0)) * inv_batch;
    }
  }
  out.loss *= inv_batch;
  return out;
}

/// uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)); weights are out x in.
inline Tensor2 glorot_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng) {
  Tensor2 w(fan_out, fan_in);
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.data()) v = rng.uniform(-bound, bound);
  return w;
}

// ---------------------------------------------------------------------------
// Parameter sets
// ---------------------------------------------------------------------------
//
// Every trainable model is a struct exposing
//   template <class F> void for_each_tensor(F&& f)        // f(name, Tensor2&)
//   template <class F> void for_each_tensor(F&& f) const  // f(name, const Tensor2&)
// which drives the optimizer, gradient buffers, and serialization uniformly.

template <typename Params>
std::vector<Tensor2*> tensor_list(Params& params) {
  std::vector<Tensor2*> out;
  params.for_each_tensor([&](const std::string&, Tensor2& t) { out.push_back(&t); });
  return out;
}

template <typename Params>
std::vector<const Tensor2*> tensor_list(const Params& params) {
  std::vector<const Tensor2*> out;
  params.for_each_tensor([&](const std::string&, const Tensor2& t) { out.push_back(&t); });
  return out;
}

template <typename Params>
Params zeros_like(const Params& params) {
  Params out = params;
  out.for_each_tensor([](const std::string&, Tensor2& t) { std::fill(t.data().begin(), t.data().end(), 0.0); });
  return out;
}

/// Rounds every parameter to float32 so in-memory models match what the
/// on-disk container stores.
template <typename Params>
void quantize_f32(Params& params) {
  params.for_each_tensor([](const std::string&, Tensor2& t) {
    for (double& v : t.data()) v = static_cast<double>(static_cast<float>(v));
  });
}

// ---------------------------------------------------------------------------
// Adam with decoupled weight decay
// ---------------------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Tensor2> first_moment;
  std::vector<Tensor2> second_moment;
  std::size_t step = 0;

  AdamState() = default;
  AdamState(const AdamConfig& cfg, std::span<Tensor2* const> params) : config(cfg) {
    for (const Tensor2* p : params) {
      first_moment.emplace_back(p->rows(), p->cols());
      second_moment.emplace_back(p->rows(), p->cols());
    }
  }
};

/// param -= lr·wd·param, then the bias-corrected Adam update.
inline void adam_step(std::span<Tensor2* const> params, std::span<const Tensor2* const> grads,
                      AdamState& state) {
  require(params.size() == grads.size() && params.size() == state.first_moment.size(),
          ErrorCode::kShapeMismatch, "optimizer parameter/gradient count mismatch");
  const auto& cfg = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor2& p = *params[k];
    const Tensor2& g = *grads[k];
    check_same_shape(p, g, "adam_step gradient");
    check_same_shape(p, state.first_moment[k], "adam_step moment");
    auto& m = state.first_moment[k].data();
    auto& v = state.second_moment[k].data();
    auto& pd = p.data();
    const auto& gd = g.data();
    for (std::size_t i = 0; i < pd.size(); ++i) {
      pd[i] -= cfg.learning_rate * cfg.weight_decay * pd[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gd[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gd[i] * gd[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      pd[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

template <typename Params>
void adam_step(Params& params, const Params& grads, AdamState& state) {
  const auto p = tensor_list(params);
  const auto g = tensor_list(grads);
  adam_step(std::span<Tensor2* const>(p), std::span<const Tensor2* const>(g), state);
}

/// Shared minibatch schedule for every trainer.
struct TrainOptions {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  AdamConfig adam;
};

/// Shuffled minibatches of indices [0, n) for one epoch.
inline std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size,
                                                           Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size)
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + batch_size)));
  return batches;
}

/// Gathers rows of `x` into a new matrix.
inline Tensor2 gather_rows(const Tensor2& x, std::span<const std::size_t> idx) {
  Tensor2 out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto src = x.row(idx[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace stdc
