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
#include <complex>
#include <cstddef>
#include <vector>

#include "stdc/fft.hpp"
#include "stdc/framing.hpp"
#include "stdc/grid.hpp"

namespace stdc {

inline constexpr std::size_t kDefaultFftSize = 2048;
inline constexpr std::size_t kDefaultHop = 512;
inline constexpr std::size_t kDefaultMels = 128;

enum class SpectrogramKind { kLogMel, kLdpCode, kIntegralMap };

/// Band-by-frame matrix (rows are mel bands, columns are frames).
struct SpectrogramMatrix {
  Grid<double> values;
  SpectrogramKind kind = SpectrogramKind::kLogMel;

  std::size_t n_mels() const noexcept { return values.rows(); }
  std::size_t frame_count() const noexcept { return values.cols(); }
  bool operator==(const SpectrogramMatrix&) const = default;
};

/// |DFT|² per frame; result is frame_count x (frame_length/2 + 1).
inline Grid<double> power_spectrum(const FrameMatrix& frames) {
  const std::size_t n = frames.frame_length();
  require(is_power_of_two(n), ErrorCode::kBadFrameLength,
          "frame length " + std::to_string(n) + " is not a power of two");
  const std::size_t bins = n / 2 + 1;
  Grid<double> power(frames.frame_count(), bins);
  std::vector<std::complex<double>> buf(n);
  for (std::size_t k = 0; k < frames.frame_count(); ++k) {
    const auto row = frames.frames.row(k);
    std::copy(row.begin(), row.end(), buf.begin());
    fft_inplace(buf);
    auto out = power.row(k);
    for (std::size_t b = 0; b < bins; ++b) out[b] = std::norm(buf[b]);
  }
  return power;
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Edge and center frequencies (Hz) of the filterbank: n_mels + 2 points
/// uniformly spaced on the mel scale from 0 to sample_rate/2.
inline std::vector<double> mel_band_edges(std::size_t n_mels, int sample_rate) {
  const double top = hz_to_mel(sample_rate / 2.0);
  std::vector<double> hz(n_mels + 2);
  for (std::size_t i = 0; i < hz.size(); ++i)
    hz[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  return hz;
}

/// Peak-normalized triangular filters, n_mels x (n_fft/2 + 1).
inline Grid<double> mel_filterbank(std::size_t n_mels, std::size_t n_fft, int sample_rate) {
  require(n_mels >= 1, ErrorCode::kInvalidArgument, "n_mels must be at least 1");
  require(is_power_of_two(n_fft), ErrorCode::kBadFrameLength, "n_fft must be a power of two");
  const std::size_t bins = n_fft / 2 + 1;
  require(n_mels <= bins, ErrorCode::kTooManyBands,
          std::to_string(n_mels) + " mel bands exceed " + std::to_string(bins) + " FFT bins");
  const auto edges = mel_band_edges(n_mels, sample_rate);
  Grid<double> fb(n_mels, bins);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (std::size_t b = 0; b < bins; ++b) {
      const double f = b * bin_hz;
      double w = 0.0;
      if (f > left && f < center) {
        w = (f - left) / (center - left);
      } else if (f >= center && f < right) {
        w = (right - f) / (right - center);
      }
      fb(m, b) = w;
    }
  }
  return fb;
}

/// log(1 + Σ_bin power·H_m) for every band and frame.
inline SpectrogramMatrix log_mel(const FrameMatrix& frames, const Grid<double>& filterbank) {
  const auto power = power_spectrum(frames);
  require(filterbank.cols() == power.cols(), ErrorCode::kShapeMismatch,
          "filterbank bin count does not match the spectrum");
  SpectrogramMatrix out{Grid<double>(filterbank.rows(), frames.frame_count()),
                        SpectrogramKind::kLogMel};
  for (std::size_t k = 0; k < frames.frame_count(); ++k) {
    const auto p = power.row(k);
    for (std::size_t m = 0; m < filterbank.rows(); ++m) {
      const auto h = filterbank.row(m);
      double energy = 0.0;
      for (std::size_t b = 0; b < p.size(); ++b) energy += p[b] * h[b];
      out.values(m, k) = std::log1p(energy);
    }
  }
  return out;
}

/// Front end with a prebuilt filterbank; safe to share read-only across threads.
class LogMelExtractor {
 public:
  LogMelExtractor(int sample_rate = 16000, std::size_t n_fft = kDefaultFftSize,
                  std::size_t hop = kDefaultHop, std::size_t n_mels = kDefaultMels)
      : sample_rate_(sample_rate),
        n_fft_(n_fft),
        hop_(hop),
        filterbank_(mel_filterbank(n_mels, n_fft, sample_rate)) {}

  SpectrogramMatrix operator()(const AudioBuffer& buf) const {
    require(buf.sample_rate() == sample_rate_, ErrorCode::kInvalidArgument,
            "buffer rate " + std::to_string(buf.sample_rate()) + " differs from extractor rate " +
                std::to_string(sample_rate_));
    return log_mel(frame_signal(buf, n_fft_, hop_, true), filterbank_);
  }

  const Grid<double>& filterbank() const noexcept { return filterbank_; }
  int sample_rate() const noexcept { return sample_rate_; }
  std::size_t n_fft() const noexcept { return n_fft_; }
  std::size_t hop() const noexcept { return hop_; }
  std::size_t n_mels() const noexcept { return filterbank_.rows(); }

 private:
  int sample_rate_;
  std::size_t n_fft_;
  std::size_t hop_;
  Grid<double> filterbank_;
};

}  // namespace stdc
