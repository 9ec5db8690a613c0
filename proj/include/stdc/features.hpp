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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <span>
#include <string_view>

#include "stdc/error.hpp"

namespace stdc {

enum class FeatureKind : std::uint8_t { kSdc = 1, kStc = 2, kStdc = 3 };

constexpr std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kSdc: return "sdc";
    case FeatureKind::kStc: return "stc";
    case FeatureKind::kStdc: return "stdc";
  }
  return "";
}

inline constexpr std::size_t kFeatureDim = 128;

/// Fixed-length 128-D coefficient vector tagged at compile time with the
/// stage that produced it.
template <FeatureKind Kind>
class Coefficients {
 public:
  static constexpr FeatureKind kind = Kind;
  static constexpr std::size_t dim = kFeatureDim;

  Coefficients() { values_.fill(0.0); }

  explicit Coefficients(std::span<const double> values) {
    require(values.size() == dim, ErrorCode::kShapeMismatch,
            std::string(to_string(Kind)) + " vector needs " + std::to_string(dim) +
                " entries, got " + std::to_string(values.size()));
    require(std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }),
            ErrorCode::kNonFiniteInput, "non-finite coefficient");
    std::copy(values.begin(), values.end(), values_.begin());
  }

  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double, kFeatureDim> values() const noexcept { return values_; }
  static constexpr std::size_t size() noexcept { return dim; }

  bool operator==(const Coefficients&) const = default;

 private:
  std::array<double, kFeatureDim> values_;
};

using SdcVector = Coefficients<FeatureKind::kSdc>;
using StcVector = Coefficients<FeatureKind::kStc>;
using StdcVector = Coefficients<FeatureKind::kStdc>;

}  // namespace stdc
