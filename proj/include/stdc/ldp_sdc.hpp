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
/*
 * Spectral deviated coefficients.
 *
 * A log-Mel spectrogram is coded with a ternary local operator over every
 * 3x3 neighborhood: each of the 8 neighbors is compared against the center
 * shifted up and down by the mean of the window. The +1 and -1 outcomes are
 * split into two binary planes ("higher" and "lower"), each plane is packed
 * into an 8-bit integer per cell, cells that exceed the grand mean of their
 * plane's per-band means in *both* planes are kept, and the kept values are
 * summed per band and projected through a DFT to a 128-D descriptor.
 *
 * Axis convention: rows are mel bands, columns are frames, and "north" is
 * row - 1. Neighbors are visited counter-clockwise starting east:
 * E, NE, N, NW, W, SW, S, SE, carrying bit weights 1, 2, 4, ..., 128.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "stdc/features.hpp"
#include "stdc/fft.hpp"
#include "stdc/grid.hpp"
#include "stdc/melspec.hpp"

namespace stdc {

inline constexpr std::size_t kNeighbors = 8;

struct Offset {
  int dr;
  int dc;
};

/// Counter-clockwise from east; index i carries bit weight 2^i.
inline constexpr std::array<Offset, kNeighbors> kNeighborOrder = {{
    {0, +1},   // E
    {-1, +1},  // NE
    {-1, 0},   // N
    {-1, -1},  // NW
    {0, -1},   // W
    {+1, -1},  // SW
    {+1, 0},   // S
    {+1, +1},  // SE
}};

using Window3 = std::array<std::array<double, 3>, 3>;

struct LdpCell {
  std::array<std::int8_t, kNeighbors> codes{};
  std::array<std::uint8_t, kNeighbors> higher{};
  std::array<std::uint8_t, kNeighbors> lower{};
};

/// Codes one 3x3 window. The threshold is the window mean; the +1 test is
/// checked before the -1 test so ties resolve deterministically.
inline LdpCell ldp_code_cell(const Window3& window) {
  double sum = 0.0;
  for (const auto& r : window)
    for (double v : r) {
      require(std::isfinite(v), ErrorCode::kNonFiniteInput, "non-finite spectrogram value");
      sum += v;
    }
  const double mu = sum / 9.0;
  const double center = window[1][1];
  const double upper = center + mu;
  const double lower = center - mu;
  LdpCell cell;
  for (std::size_t i = 0; i < kNeighbors; ++i) {
    const double v = window[1 + kNeighborOrder[i].dr][1 + kNeighborOrder[i].dc];
    std::int8_t code = 0;
    if (v >= upper) {
      code = 1;
    } else if (v <= lower) {
      code = -1;
    }
    cell.codes[i] = code;
    cell.higher[i] = code == 1 ? 1 : 0;
    cell.lower[i] = code == -1 ? 1 : 0;
  }
  return cell;
}

/// One binary plane per neighbor direction for each of the two pattern sets.
/// Shape is the interior of the source: (n_mels - 2) x (frames - 2).
struct LdpMaps {
  std::array<Grid<std::uint8_t>, kNeighbors> higher;
  std::array<Grid<std::uint8_t>, kNeighbors> lower;

  std::size_t rows() const noexcept { return higher[0].rows(); }
  std::size_t cols() const noexcept { return higher[0].cols(); }
  bool operator==(const LdpMaps&) const = default;
};

inline LdpMaps ldp_maps(const SpectrogramMatrix& spec) {
  require(spec.kind == SpectrogramKind::kLogMel, ErrorCode::kInvalidArgument,
          "LDP coding expects a log-Mel spectrogram");
  const auto& s = spec.values;
  require(s.rows() >= 3 && s.cols() >= 3, ErrorCode::kSpectrogramTooSmall,
          "spectrogram must be at least 3x3, got " + std::to_string(s.rows()) + "x" +
              std::to_string(s.cols()));
  for (double v : s.data())
    require(std::isfinite(v), ErrorCode::kNonFiniteInput, "non-finite spectrogram value");

  const std::size_t rows = s.rows() - 2;
  const std::size_t cols = s.cols() - 2;
  LdpMaps maps;
  for (std::size_t d = 0; d < kNeighbors; ++d) {
    maps.higher[d] = Grid<std::uint8_t>(rows, cols);
    maps.lower[d] = Grid<std::uint8_t>(rows, cols);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      // Same arithmetic as ldp_code_cell (row-major summation of the window)
      // without the copy.
      double sum = 0.0;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) sum += s(r + i, c + j);
      const double mu = sum / 9.0;
      const double center = s(r + 1, c + 1);
      const double upper = center + mu;
      const double lower = center - mu;
      for (std::size_t d = 0; d < kNeighbors; ++d) {
        const double v = s(r + 1 + kNeighborOrder[d].dr, c + 1 + kNeighborOrder[d].dc);
        if (v >= upper) {
          maps.higher[d](r, c) = 1;
        } else if (v <= lower) {
          maps.lower[d](r, c) = 1;
        }
      }
    }
  }
  return maps;
}

/// Packed 8-bit patterns per interior cell.
struct IntegralMaps {
  Grid<std::uint8_t> higher;
  Grid<std::uint8_t> lower;

  bool operator==(const IntegralMaps&) const = default;
};

inline IntegralMaps integralize(const LdpMaps& maps) {
  const std::size_t rows = maps.rows(), cols = maps.cols();
  IntegralMaps out{Grid<std::uint8_t>(rows, cols), Grid<std::uint8_t>(rows, cols)};
  for (std::size_t d = 0; d < kNeighbors; ++d) {
    require(maps.higher[d].rows() == rows && maps.higher[d].cols() == cols &&
                maps.lower[d].rows() == rows && maps.lower[d].cols() == cols,
            ErrorCode::kShapeMismatch, "LDP bit planes differ in shape");
    const auto weight = static_cast<std::uint8_t>(1u << d);
    auto& hi = out.higher.data();
    auto& lo = out.lower.data();
    const auto& hb = maps.higher[d].data();
    const auto& lb = maps.lower[d].data();
    for (std::size_t i = 0; i < hi.size(); ++i) {
      if (hb[i]) hi[i] = static_cast<std::uint8_t>(hi[i] | weight);
      if (lb[i]) lo[i] = static_cast<std::uint8_t>(lo[i] | weight);
    }
  }
  return out;
}

/// Inverse of integralize.
inline LdpMaps decode_integral(const IntegralMaps& ints) {
  const std::size_t rows = ints.higher.rows(), cols = ints.higher.cols();
  LdpMaps maps;
  for (std::size_t d = 0; d < kNeighbors; ++d) {
    maps.higher[d] = Grid<std::uint8_t>(rows, cols);
    maps.lower[d] = Grid<std::uint8_t>(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i) {
      maps.higher[d].data()[i] = (ints.higher.data()[i] >> d) & 1u;
      maps.lower[d].data()[i] = (ints.lower.data()[i] >> d) & 1u;
    }
  }
  return maps;
}

/// Mean over frames of each band (the per-band mean vector).
inline std::vector<double> band_means(const Grid<std::uint8_t>& plane) {
  std::vector<double> means(plane.rows(), 0.0);
  if (plane.cols() == 0) return means;
  for (std::size_t r = 0; r < plane.rows(); ++r) {
    double sum = 0.0;
    for (auto v : plane.row(r)) sum += v;
    means[r] = sum / static_cast<double>(plane.cols());
  }
  return means;
}

/// Grand mean of the per-band means (the central tendency value).
inline double central_tendency(const Grid<std::uint8_t>& plane) {
  const auto means = band_means(plane);
  if (means.empty()) return 0.0;
  double sum = 0.0;
  for (double m : means) sum += m;
  return sum / static_cast<double>(means.size());
}

/// 1 where both planes strictly exceed their own central tendency.
inline Grid<std::uint8_t> select_sdc_mask(const IntegralMaps& ints) {
  require(ints.higher.rows() == ints.lower.rows() && ints.higher.cols() == ints.lower.cols(),
          ErrorCode::kShapeMismatch, "integral maps differ in shape");
  const double ctv_h = central_tendency(ints.higher);
  const double ctv_l = central_tendency(ints.lower);
  Grid<std::uint8_t> mask(ints.higher.rows(), ints.higher.cols());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask.data()[i] =
        (ints.higher.data()[i] > ctv_h && ints.lower.data()[i] > ctv_l) ? 1 : 0;
  }
  return mask;
}

/// Per-band sum over frames of mask·(higher + lower).
inline std::vector<double> masked_band_sums(const IntegralMaps& ints,
                                            const Grid<std::uint8_t>& mask) {
  std::vector<double> sums(mask.rows(), 0.0);
  for (std::size_t r = 0; r < mask.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < mask.cols(); ++c) {
      if (mask(r, c))
        acc += static_cast<double>(ints.higher(r, c)) + static_cast<double>(ints.lower(r, c));
    }
    sums[r] = acc;
  }
  return sums;
}

/// log(1 + |DFT|) of the band profile zero-padded to 256, first 128 bins.
inline SdcVector project_band_profile(const std::vector<double>& profile) {
  constexpr std::size_t kPadded = 2 * kFeatureDim;
  require(profile.size() <= kPadded, ErrorCode::kShapeMismatch,
          "band profile longer than " + std::to_string(kPadded));
  std::vector<std::complex<double>> buf(kPadded);
  std::copy(profile.begin(), profile.end(), buf.begin());
  fft_inplace(buf);
  std::array<double, kFeatureDim> coeffs;
  for (std::size_t b = 0; b < kFeatureDim; ++b) coeffs[b] = std::log1p(std::abs(buf[b]));
  return SdcVector(coeffs);
}

inline SdcVector sdc_features(const SpectrogramMatrix& spec) {
  const auto ints = integralize(ldp_maps(spec));
  const auto mask = select_sdc_mask(ints);
  return project_band_profile(masked_band_sums(ints, mask));
}

}  // namespace stdc
