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

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stdc/features.hpp"
#include "stdc/melspec.hpp"
#include "stdc/tensor.hpp"

namespace stdc {

inline constexpr std::size_t kStcHidden = 64;
inline constexpr std::size_t kMaxFrames = 256;

/// One LSTM direction. Gate blocks are stacked [input, forget, cell, output],
/// each `hidden` rows tall.
struct LstmParams {
  Tensor2 w_input;      // 4H x In
  Tensor2 w_recurrent;  // 4H x H
  Tensor2 bias;         // 1 x 4H

  std::size_t input_dim() const noexcept { return w_input.cols(); }
  std::size_t hidden() const noexcept { return w_recurrent.cols(); }

  static LstmParams init(std::size_t input_dim, std::size_t hidden, Rng& rng) {
    return {glorot_uniform(4 * hidden, input_dim, rng), glorot_uniform(4 * hidden, hidden, rng),
            Tensor2(1, 4 * hidden)};
  }

  template <typename F>
  void for_each_tensor(F&& f) {
    f("w_input", w_input);
    f("w_recurrent", w_recurrent);
    f("bias", bias);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    f("w_input", w_input);
    f("w_recurrent", w_recurrent);
    f("bias", bias);
  }
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

/// Post-activation gate values of one step, kept for the backward pass.
struct LstmGates {
  std::vector<double> i, f, g, o;
};

namespace detail {

inline void lstm_pointwise(std::span<const double> z, std::span<const double> c_prev,
                           std::span<double> h, std::span<double> c, LstmGates* gates) {
  const std::size_t hidden = c_prev.size();
  for (std::size_t k = 0; k < hidden; ++k) {
    const double i = sigmoid(z[k]);
    const double f = sigmoid(z[hidden + k]);
    const double g = std::tanh(z[2 * hidden + k]);
    const double o = sigmoid(z[3 * hidden + k]);
    c[k] = f * c_prev[k] + i * g;
    h[k] = o * std::tanh(c[k]);
    if (gates) {
      gates->i[k] = i;
      gates->f[k] = f;
      gates->g[k] = g;
      gates->o[k] = o;
    }
  }
}

}  // namespace detail

/// c' = f⊙c + i⊙g, h' = o⊙tanh(c'), with i, f, o sigmoid gates and g = tanh.
inline LstmState lstm_cell(std::span<const double> x, const LstmState& state,
                           const LstmParams& params) {
  const std::size_t hidden = params.hidden();
  require(x.size() == params.input_dim(), ErrorCode::kShapeMismatch, "lstm_cell: input size");
  require(state.h.size() == hidden && state.c.size() == hidden, ErrorCode::kShapeMismatch,
          "lstm_cell: state size");
  std::vector<double> z(4 * hidden);
  for (std::size_t r = 0; r < 4 * hidden; ++r) {
    double acc = params.bias(0, r);
    const auto wi = params.w_input.row(r);
    for (std::size_t k = 0; k < x.size(); ++k) acc += wi[k] * x[k];
    const auto wh = params.w_recurrent.row(r);
    for (std::size_t k = 0; k < hidden; ++k) acc += wh[k] * state.h[k];
    z[r] = acc;
  }
  LstmState next{std::vector<double>(hidden), std::vector<double>(hidden)};
  detail::lstm_pointwise(z, state.c, next.h, next.c, nullptr);
  return next;
}

/// Everything one direction needs for backpropagation through time. Rows are
/// indexed by original time step, not processing order.
struct LstmTrace {
  bool reverse = false;
  Tensor2 h;       // T x H outputs
  Tensor2 c;       // T x H cell states
  Tensor2 gate_i, gate_f, gate_g, gate_o;
};

inline LstmTrace lstm_sequence_forward(const Tensor2& xs, const LstmParams& params, bool reverse) {
  const std::size_t steps = xs.rows();
  const std::size_t hidden = params.hidden();
  require(steps > 0, ErrorCode::kEmptySequence, "LSTM input sequence is empty");
  require(xs.cols() == params.input_dim(), ErrorCode::kShapeMismatch, "LSTM input width");

  Tensor2 xz = dense_forward(xs, params.w_input, params.bias);  // T x 4H
  LstmTrace tr{reverse,         Tensor2(steps, hidden), Tensor2(steps, hidden),
               Tensor2(steps, hidden), Tensor2(steps, hidden), Tensor2(steps, hidden),
               Tensor2(steps, hidden)};
  std::vector<double> h_prev(hidden, 0.0), c_prev(hidden, 0.0), z(4 * hidden);
  LstmGates gates{std::vector<double>(hidden), std::vector<double>(hidden),
                  std::vector<double>(hidden), std::vector<double>(hidden)};
  for (std::size_t n = 0; n < steps; ++n) {
    const std::size_t t = reverse ? steps - 1 - n : n;
    const auto xrow = xz.row(t);
    for (std::size_t r = 0; r < 4 * hidden; ++r) {
      const auto wh = params.w_recurrent.row(r);
      double acc = xrow[r];
      for (std::size_t k = 0; k < hidden; ++k) acc += wh[k] * h_prev[k];
      z[r] = acc;
    }
    detail::lstm_pointwise(z, c_prev, tr.h.row(t), tr.c.row(t), &gates);
    std::copy(gates.i.begin(), gates.i.end(), tr.gate_i.row(t).begin());
    std::copy(gates.f.begin(), gates.f.end(), tr.gate_f.row(t).begin());
    std::copy(gates.g.begin(), gates.g.end(), tr.gate_g.row(t).begin());
    std::copy(gates.o.begin(), gates.o.end(), tr.gate_o.row(t).begin());
    const auto hr = tr.h.row(t);
    const auto cr = tr.c.row(t);
    std::copy(hr.begin(), hr.end(), h_prev.begin());
    std::copy(cr.begin(), cr.end(), c_prev.begin());
  }
  return tr;
}

/// Backpropagation through time. `dh` holds dL/dh for every step (T x H, time
/// aligned); gradients accumulate into `grads`; returns dL/dxs.
inline Tensor2 lstm_sequence_backward(const Tensor2& xs, const LstmParams& params,
                                      const LstmTrace& tr, const Tensor2& dh,
                                      LstmParams& grads) {
  const std::size_t steps = xs.rows();
  const std::size_t hidden = params.hidden();
  check_same_shape(dh, tr.h, "lstm backward dh");
  Tensor2 dz_all(steps, 4 * hidden);
  std::vector<double> dh_next(hidden, 0.0), dc_next(hidden, 0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    // Walk processing order backwards.
    const std::size_t t = tr.reverse ? n : steps - 1 - n;
    const bool first = n == steps - 1;
    const std::size_t t_prev = tr.reverse ? t + 1 : t - 1;  // valid unless `first`
    auto dz = dz_all.row(t);
    for (std::size_t k = 0; k < hidden; ++k) {
      const double i = tr.gate_i(t, k), f = tr.gate_f(t, k), g = tr.gate_g(t, k),
                   o = tr.gate_o(t, k);
      const double tanh_c = std::tanh(tr.c(t, k));
      const double c_prev = first ? 0.0 : tr.c(t_prev, k);
      const double dhk = dh(t, k) + dh_next[k];
      const double dc = dhk * o * (1.0 - tanh_c * tanh_c) + dc_next[k];
      dz[k] = dc * g * i * (1.0 - i);
      dz[hidden + k] = dc * c_prev * f * (1.0 - f);
      dz[2 * hidden + k] = dc * i * (1.0 - g * g);
      dz[3 * hidden + k] = dhk * tanh_c * o * (1.0 - o);
      dc_next[k] = dc * f;
    }
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (std::size_t r = 0; r < 4 * hidden; ++r) {
      const double d = dz[r];
      if (d == 0.0) continue;
      const auto wh = params.w_recurrent.row(r);
      for (std::size_t k = 0; k < hidden; ++k) dh_next[k] += d * wh[k];
      if (!first) {
        auto gw = grads.w_recurrent.row(r);
        const auto hp = tr.h.row(t_prev);
        for (std::size_t k = 0; k < hidden; ++k) gw[k] += d * hp[k];
      }
    }
  }
  add_matmul_tn(grads.w_input, dz_all, xs);
  add_col_sums(grads.bias, dz_all);
  return matmul(dz_all, params.w_input);
}

/// Two stacked bidirectional layers; cells[layer][0] runs forward in time,
/// cells[layer][1] backward.
struct BiLstmParams {
  std::array<std::array<LstmParams, 2>, 2> cells;

  std::size_t input_dim() const noexcept { return cells[0][0].input_dim(); }
  std::size_t hidden() const noexcept { return cells[0][0].hidden(); }
  std::size_t output_dim() const noexcept { return 2 * hidden(); }

  static BiLstmParams init(std::size_t input_dim, std::size_t hidden, std::uint64_t seed) {
    Rng rng(seed);
    BiLstmParams p;
    for (std::size_t layer = 0; layer < 2; ++layer)
      for (std::size_t dir = 0; dir < 2; ++dir)
        p.cells[layer][dir] = LstmParams::init(layer == 0 ? input_dim : 2 * hidden, hidden, rng);
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
  static void visit(Self& self, F& f) {
    for (std::size_t layer = 0; layer < 2; ++layer)
      for (std::size_t dir = 0; dir < 2; ++dir) {
        const std::string prefix = "stc.layer" + std::to_string(layer) +
                                   (dir == 0 ? ".forward." : ".backward.");
        self.cells[layer][dir].for_each_tensor(
            [&](const std::string& name, auto& t) { f(prefix + name, t); });
      }
  }
};

struct StcTrace {
  Tensor2 input;                      // T x In
  std::array<LstmTrace, 2> layer0;    // forward, backward
  Tensor2 layer0_out;                 // T x 2H
  std::array<LstmTrace, 2> layer1;
};

namespace detail {

inline Tensor2 concat_directions(const LstmTrace& fwd, const LstmTrace& bwd) {
  const std::size_t steps = fwd.h.rows(), hidden = fwd.h.cols();
  Tensor2 out(steps, 2 * hidden);
  for (std::size_t t = 0; t < steps; ++t) {
    auto o = out.row(t);
    const auto a = fwd.h.row(t);
    const auto b = bwd.h.row(t);
    std::copy(a.begin(), a.end(), o.begin());
    std::copy(b.begin(), b.end(), o.begin() + static_cast<std::ptrdiff_t>(hidden));
  }
  return out;
}

}  // namespace detail

/// Runs both layers; the utterance summary is the last forward state of
/// layer 2 followed by the backward direction's state at step 0 (its final
/// processed step).
inline std::vector<double> bilstm_forward(const Tensor2& xs, const BiLstmParams& params,
                                          StcTrace* trace = nullptr) {
  require(xs.rows() > 0, ErrorCode::kEmptySequence, "STC input has no frames");
  StcTrace local;
  StcTrace& tr = trace ? *trace : local;
  tr.input = xs;
  tr.layer0[0] = lstm_sequence_forward(xs, params.cells[0][0], false);
  tr.layer0[1] = lstm_sequence_forward(xs, params.cells[0][1], true);
  tr.layer0_out = detail::concat_directions(tr.layer0[0], tr.layer0[1]);
  tr.layer1[0] = lstm_sequence_forward(tr.layer0_out, params.cells[1][0], false);
  tr.layer1[1] = lstm_sequence_forward(tr.layer0_out, params.cells[1][1], true);

  const std::size_t hidden = params.hidden();
  std::vector<double> out(2 * hidden);
  const auto last = tr.layer1[0].h.row(xs.rows() - 1);
  const auto first = tr.layer1[1].h.row(0);
  std::copy(last.begin(), last.end(), out.begin());
  std::copy(first.begin(), first.end(), out.begin() + static_cast<std::ptrdiff_t>(hidden));
  return out;
}

/// Accumulates parameter gradients for dL/d(summary) = `dout`.
inline void bilstm_backward(const StcTrace& tr, const BiLstmParams& params,
                            std::span<const double> dout, BiLstmParams& grads) {
  const std::size_t steps = tr.input.rows();
  const std::size_t hidden = params.hidden();
  require(dout.size() == 2 * hidden, ErrorCode::kShapeMismatch, "STC output gradient size");

  Tensor2 dh_fwd(steps, hidden), dh_bwd(steps, hidden);
  for (std::size_t k = 0; k < hidden; ++k) {
    dh_fwd(steps - 1, k) = dout[k];
    dh_bwd(0, k) = dout[hidden + k];
  }
  Tensor2 dmid = lstm_sequence_backward(tr.layer0_out, params.cells[1][0], tr.layer1[0], dh_fwd,
                                        grads.cells[1][0]);
  const Tensor2 dmid_b = lstm_sequence_backward(tr.layer0_out, params.cells[1][1], tr.layer1[1],
                                                dh_bwd, grads.cells[1][1]);
  for (std::size_t i = 0; i < dmid.size(); ++i) dmid.data()[i] += dmid_b.data()[i];

  Tensor2 d0f(steps, hidden), d0b(steps, hidden);
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t k = 0; k < hidden; ++k) {
      d0f(t, k) = dmid(t, k);
      d0b(t, k) = dmid(t, hidden + k);
    }
  lstm_sequence_backward(tr.input, params.cells[0][0], tr.layer0[0], d0f, grads.cells[0][0]);
  lstm_sequence_backward(tr.input, params.cells[0][1], tr.layer0[1], d0b, grads.cells[0][1]);
}

/// Frames become time steps: returns min(frames, max_frames) x n_mels.
inline Tensor2 spectrogram_sequence(const SpectrogramMatrix& spec,
                                    std::size_t max_frames = kMaxFrames) {
  require(spec.kind == SpectrogramKind::kLogMel, ErrorCode::kInvalidArgument,
          "STC expects a log-Mel spectrogram");
  const std::size_t steps = std::min(spec.frame_count(), max_frames);
  require(steps > 0, ErrorCode::kEmptySequence, "spectrogram has no frames");
  Tensor2 xs(steps, spec.n_mels());
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t m = 0; m < spec.n_mels(); ++m) xs(t, m) = spec.values(m, t);
  return xs;
}

inline StcVector stc_features(const SpectrogramMatrix& spec, const BiLstmParams& params,
                              std::size_t max_frames = kMaxFrames) {
  require(params.output_dim() == kFeatureDim, ErrorCode::kShapeMismatch,
          "STC network must emit 128 values");
  return StcVector(bilstm_forward(spectrogram_sequence(spec, max_frames), params));
}

}  // namespace stdc
