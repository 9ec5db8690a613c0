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
#include <numbers>
#include <vector>

#include "stdc/audio_io.hpp"
#include "stdc/grid.hpp"

namespace stdc {

inline constexpr double kHammingAlpha = 0.54;
inline constexpr double kHammingBeta = 0.46;

/// Symmetric Hamming window, w[n] = 0.54 - 0.46·cos(2πn/(N-1)).
inline std::vector<double> hamming_window(std::size_t length) {
  require(length >= 1, ErrorCode::kZeroLength, "window length must be at least 1");
  if (length == 1) return {1.0};
  std::vector<double> w(length);
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = kHammingAlpha - kHammingBeta * std::cos(2.0 * std::numbers::pi * n / denom);
  // Force exact symmetry; cos() rounding can differ in the last ulp.
  for (std::size_t n = 0; n < length / 2; ++n) w[length - 1 - n] = w[n];
  return w;
}

struct FrameMatrix {
  Grid<double> frames;  // frame_count x frame_length
  std::size_t hop = 0;
  bool windowed = false;

  std::size_t frame_count() const noexcept { return frames.rows(); }
  std::size_t frame_length() const noexcept { return frames.cols(); }
};

inline std::size_t frame_count_for(std::size_t signal_length, std::size_t frame_length,
                                   std::size_t hop) {
  if (signal_length < frame_length) return 0;
  return (signal_length - frame_length) / hop + 1;
}

/// Splits the signal into frames of `frame_length` every `hop` samples; a
/// trailing partial frame is dropped.
inline FrameMatrix frame_signal(const AudioBuffer& buf, std::size_t frame_length,
                                std::size_t hop, bool windowed) {
  require(frame_length >= 1, ErrorCode::kZeroLength, "frame length must be at least 1");
  require(hop >= 1, ErrorCode::kZeroLength, "hop must be at least 1");
  const auto& x = buf.samples();
  require(x.size() >= frame_length, ErrorCode::kSignalTooShort,
          "signal of " + std::to_string(x.size()) + " samples is shorter than one frame of " +
              std::to_string(frame_length));
  const std::size_t count = frame_count_for(x.size(), frame_length, hop);
  FrameMatrix out{Grid<double>(count, frame_length), hop, windowed};
  const auto window = windowed ? hamming_window(frame_length) : std::vector<double>{};
  for (std::size_t k = 0; k < count; ++k) {
    auto row = out.frames.row(k);
    const std::size_t start = k * hop;
    for (std::size_t n = 0; n < frame_length; ++n)
      row[n] = windowed ? x[start + n] * window[n] : x[start + n];
  }
  return out;
}

}  // namespace stdc
