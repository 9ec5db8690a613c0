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

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "stdc/audio_io.hpp"
#include "stdc/tensor.hpp"

namespace stdc {

enum class HeadVariant { kLogistic, kMlp };

/// Output row 0 is bona fide, row 1 is spoof.
constexpr int class_index(Label label) { return label == Label::kBonaFide ? 0 : 1; }

inline std::optional<HeadVariant> parse_head_variant(std::string_view s) {
  if (s == "logistic") return HeadVariant::kLogistic;
  if (s == "mlp") return HeadVariant::kMlp;
  return std::nullopt;
}

struct HeadParams {
  HeadVariant variant = HeadVariant::kMlp;
  Tensor2 hidden_w, hidden_b;  // mlp only
  Tensor2 out_w, out_b;

  std::size_t input_dim() const noexcept {
    return variant == HeadVariant::kMlp ? hidden_w.cols() : out_w.cols();
  }

  static HeadParams init(HeadVariant variant, std::uint64_t seed, std::size_t input_dim = 128,
                         std::size_t hidden = 64) {
    Rng rng(seed);
    HeadParams p;
    p.variant = variant;
    if (variant == HeadVariant::kMlp) {
      p.hidden_w = glorot_uniform(hidden, input_dim, rng);
      p.hidden_b = Tensor2(1, hidden);
      p.out_w = glorot_uniform(2, hidden, rng);
    } else {
      p.out_w = glorot_uniform(2, input_dim, rng);
    }
    p.out_b = Tensor2(1, 2);
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
    if (s.variant == HeadVariant::kMlp) {
      f("head.hidden.weight", s.hidden_w);
      f("head.hidden.bias", s.hidden_b);
    }
    f("head.out.weight", s.out_w);
    f("head.out.bias", s.out_b);
  }
};

inline Tensor2 head_logits(const Tensor2& x, const HeadParams& p, Tensor2* pre_hidden = nullptr) {
  if (p.variant == HeadVariant::kLogistic) return dense_forward(x, p.out_w, p.out_b);
  Tensor2 pre = dense_forward(x, p.hidden_w, p.hidden_b);
  Tensor2 logits = dense_forward(relu(pre), p.out_w, p.out_b);
  if (pre_hidden) *pre_hidden = std::move(pre);
  return logits;
}

/// Cross-entropy of one batch; accumulates parameter gradients and, when
/// `dx` is given, writes dL/dx.
inline double head_loss_and_grad(const Tensor2& x, std::span<const int> labels,
                                 const HeadParams& p, HeadParams& grads, Tensor2* dx = nullptr) {
  Tensor2 pre;
  const Tensor2 logits = head_logits(x, p, &pre);
  auto [loss, dlogits] = xent_softmax(logits, labels);
  if (p.variant == HeadVariant::kLogistic) {
    Tensor2 d = dense_backward(x, p.out_w, dlogits, grads.out_w, grads.out_b);
    if (dx) *dx = std::move(d);
    return loss;
  }
  Tensor2 dh = relu_backward(dense_backward(relu(pre), p.out_w, dlogits, grads.out_w, grads.out_b),
                             pre);
  Tensor2 d = dense_backward(x, p.hidden_w, dh, grads.hidden_w, grads.hidden_b);
  if (dx) *dx = std::move(d);
  return loss;
}

/// score = logit(bona fide) - logit(spoof); higher means more bona fide.
inline std::vector<double> score(const Tensor2& features, const HeadParams& p) {
  const Tensor2 logits = head_logits(features, p);
  std::vector<double> s(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) s[r] = logits(r, 0) - logits(r, 1);
  return s;
}

inline void require_both_classes(std::span<const int> labels) {
  bool has0 = false, has1 = false;
  for (int l : labels) {
    has0 = has0 || l == 0;
    has1 = has1 || l == 1;
  }
  require(has0 && has1, ErrorCode::kSingleClassData,
          "training data must contain both bona fide and spoof examples");
}

inline HeadParams train_head(const Tensor2& features, std::span<const int> labels,
                             HeadVariant variant, std::uint64_t seed,
                             const TrainOptions& options = {}) {
  require(features.rows() == labels.size(), ErrorCode::kShapeMismatch,
          "feature/label count mismatch");
  require(features.rows() > 0, ErrorCode::kEmptyTrainingSet, "no training examples");
  require_both_classes(labels);
  HeadParams params = HeadParams::init(variant, derive_seed(seed, 1), features.cols());
  Rng rng(derive_seed(seed, 2));
  auto tensors = tensor_list(params);
  AdamState adam(options.adam, tensors);
  std::vector<int> batch_labels;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& batch : epoch_batches(features.rows(), options.batch_size, rng)) {
      batch_labels.clear();
      for (auto i : batch) batch_labels.push_back(labels[i]);
      HeadParams grads = zeros_like(params);
      head_loss_and_grad(gather_rows(features, batch), batch_labels, params, grads);
      adam_step(params, grads, adam);
    }
  }
  return params;
}

inline double training_accuracy(const Tensor2& features, std::span<const int> labels,
                                const HeadParams& p) {
  const auto s = score(features, p);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < s.size(); ++i) correct += (s[i] > 0.0) == (labels[i] == 0);
  return s.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(s.size());
}

// ---------------------------------------------------------------------------
// Score files: CSV "utt_id,score,label"
// ---------------------------------------------------------------------------

struct ScoreRecord {
  std::string utt_id;
  double score = 0.0;
  Label label = Label::kBonaFide;

  bool operator==(const ScoreRecord&) const = default;
};

inline std::string format_scores(const std::vector<ScoreRecord>& records) {
  std::string out = "utt_id,score,label\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.9g", r.score);
    out += r.utt_id + "," + buf + "," + std::string(to_string(r.label)) + "\n";
  }
  return out;
}

inline void write_scores(const std::filesystem::path& path, const std::vector<ScoreRecord>& records) {
  const auto text = format_scores(records);
  write_file_bytes(path, Bytes(text.begin(), text.end()));
}

inline std::vector<ScoreRecord> parse_scores(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<ScoreRecord> out;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kBadHeader, "empty score file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "utt_id,score,label", ErrorCode::kBadHeader, "bad score header '" + line + "'");
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    require(fields.size() == 3, ErrorCode::kBadLabel,
            "score row " + std::to_string(row) + ": expected 3 fields");
    const auto label = parse_label(fields[2]);
    require(label.has_value(), ErrorCode::kBadLabel,
            "score row " + std::to_string(row) + ": unknown label '" + fields[2] + "'");
    char* end = nullptr;
    const double value = std::strtod(fields[1].c_str(), &end);
    require(end != fields[1].c_str() && std::isfinite(value), ErrorCode::kBadLabel,
            "score row " + std::to_string(row) + ": bad score '" + fields[1] + "'");
    out.push_back({fields[0], value, *label});
  }
  return out;
}

inline std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_scores(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace stdc
