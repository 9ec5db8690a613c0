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
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stdc/audio_io.hpp"
#include "stdc/random.hpp"

namespace stdc {

enum class AugmentKind { kHighpass, kLowpass, kCompress, kTimeShift, kPitchShift, kReverb };

inline constexpr std::array<AugmentKind, 6> kAllAugmentKinds = {
    AugmentKind::kHighpass,  AugmentKind::kLowpass,    AugmentKind::kCompress,
    AugmentKind::kTimeShift, AugmentKind::kPitchShift, AugmentKind::kReverb};

constexpr std::string_view to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kHighpass: return "highpass";
    case AugmentKind::kLowpass: return "lowpass";
    case AugmentKind::kCompress: return "compress";
    case AugmentKind::kTimeShift: return "time_shift";
    case AugmentKind::kPitchShift: return "pitch_shift";
    case AugmentKind::kReverb: return "reverb";
  }
  return "";
}

inline std::optional<AugmentKind> parse_augment_kind(std::string_view s) {
  for (auto k : kAllAugmentKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Parameter meaning per kind:
///   highpass, lowpass   param1 = cutoff Hz, in (0, sample_rate/2)
///   compress            param1 = threshold in (0, 1], param2 = ratio >= 1
///   time_shift          param1 = shift in samples (integer, may be negative)
///   pitch_shift         param1 = semitones in [-12, 12]
///   reverb              param1 = RT60 seconds in (0, 2], param2 = pre-delay ms in [0, 100]
struct AugmentSpec {
  AugmentKind kind = AugmentKind::kHighpass;
  double param1 = 0.0;
  double param2 = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const AugmentSpec&) const = default;

  static AugmentSpec defaults(AugmentKind kind, std::uint64_t seed = 0) {
    switch (kind) {
      case AugmentKind::kHighpass: return {kind, 300.0, 0.0, seed};
      case AugmentKind::kLowpass: return {kind, 3400.0, 0.0, seed};
      case AugmentKind::kCompress: return {kind, 0.3, 4.0, seed};
      case AugmentKind::kTimeShift: return {kind, 1600.0, 0.0, seed};
      case AugmentKind::kPitchShift: return {kind, 2.0, 0.0, seed};
      case AugmentKind::kReverb: return {kind, 0.3, 10.0, seed};
    }
    return {kind, 0.0, 0.0, seed};
  }
};

namespace detail {

inline std::vector<double> one_pole_lowpass(const std::vector<double>& x, double cutoff, int sr) {
  const double a = 1.0 - std::exp(-2.0 * std::numbers::pi * cutoff / sr);
  std::vector<double> y(x.size());
  double state = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    state += a * (x[n] - state);
    y[n] = state;
  }
  return y;
}

inline std::vector<double> one_pole_highpass(const std::vector<double>& x, double cutoff, int sr) {
  const double rc = 1.0 / (2.0 * std::numbers::pi * cutoff);
  const double dt = 1.0 / sr;
  const double b = rc / (rc + dt);
  std::vector<double> y(x.size());
  double prev_x = 0.0, prev_y = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    prev_y = b * (prev_y + x[n] - prev_x);
    prev_x = x[n];
    y[n] = prev_y;
  }
  return y;
}

inline std::vector<double> compress(const std::vector<double>& x, double threshold, double ratio) {
  std::vector<double> y(x);
  const double exponent = 1.0 / ratio - 1.0;
  for (double& v : y) {
    const double mag = std::abs(v);
    if (mag > threshold) v *= std::pow(mag / threshold, exponent);
  }
  return y;
}

inline std::vector<double> circular_shift(const std::vector<double>& x, long long shift) {
  const auto n = static_cast<long long>(x.size());
  const long long s = ((shift % n) + n) % n;
  std::vector<double> y(x.size());
  for (long long i = 0; i < n; ++i) y[static_cast<std::size_t>((i + s) % n)] = x[static_cast<std::size_t>(i)];
  return y;
}

/// Reads the input at rate 2^(semitones/12) with linear interpolation; the
/// output keeps the input length (zero-padded past the end of the input).
inline std::vector<double> pitch_shift(const std::vector<double>& x, double semitones) {
  const double rate = std::pow(2.0, semitones / 12.0);
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double pos = n * rate;
    const auto i = static_cast<std::size_t>(pos);
    if (i >= x.size()) break;
    const double frac = pos - static_cast<double>(i);
    const double next = i + 1 < x.size() ? x[i + 1] : 0.0;
    y[n] = x[i] + frac * (next - x[i]);
  }
  return y;
}

/// Exponentially decaying noise impulse response, direct path at tap 0.
inline std::vector<double> reverb_impulse(double rt60, double predelay_ms, int sr, std::uint64_t seed) {
  const auto delay = static_cast<std::size_t>(std::llround(predelay_ms * 1e-3 * sr));
  const auto tail = static_cast<std::size_t>(std::llround(rt60 * sr));
  std::vector<double> ir(delay + tail + 1, 0.0);
  ir[0] = 1.0;
  Rng rng(seed);
  // 60 dB amplitude decay over rt60: exp(-6.9078 n / (rt60·sr)).
  const double decay = std::log(1000.0) / (rt60 * sr);
  for (std::size_t n = 0; n < tail; ++n)
    ir[delay + 1 + n] = 0.5 * rng.normal() * std::exp(-decay * static_cast<double>(n));
  return ir;
}

inline std::vector<double> reverb(const std::vector<double>& x, double rt60, double predelay_ms,
                                  int sr, std::uint64_t seed) {
  const auto ir = reverb_impulse(rt60, predelay_ms, sr, seed);
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double xn = x[n];
    if (xn == 0.0) continue;
    const std::size_t taps = std::min(ir.size(), x.size() - n);
    for (std::size_t k = 0; k < taps; ++k) y[n + k] += xn * ir[k];
  }
  double in_peak = 0.0, out_peak = 0.0;
  for (double v : x) in_peak = std::max(in_peak, std::abs(v));
  for (double v : y) out_peak = std::max(out_peak, std::abs(v));
  if (out_peak > 0.0) {
    const double g = in_peak / out_peak;
    for (double& v : y) v *= g;
  }
  return y;
}

}  // namespace detail

inline void validate(const AugmentSpec& spec, int sample_rate) {
  const auto bad = [&](const std::string& what) {
    throw Error(ErrorCode::kBadParameter, std::string(to_string(spec.kind)) + ": " + what);
  };
  if (!std::isfinite(spec.param1) || !std::isfinite(spec.param2)) bad("non-finite parameter");
  switch (spec.kind) {
    case AugmentKind::kHighpass:
    case AugmentKind::kLowpass:
      if (spec.param1 <= 0.0 || spec.param1 >= sample_rate / 2.0) bad("cutoff must lie in (0, Nyquist)");
      break;
    case AugmentKind::kCompress:
      if (spec.param1 <= 0.0 || spec.param1 > 1.0) bad("threshold must lie in (0, 1]");
      if (spec.param2 < 1.0) bad("ratio must be at least 1");
      break;
    case AugmentKind::kTimeShift:
      if (spec.param1 != std::round(spec.param1)) bad("shift must be a whole number of samples");
      break;
    case AugmentKind::kPitchShift:
      if (spec.param1 < -12.0 || spec.param1 > 12.0) bad("semitones must lie in [-12, 12]");
      break;
    case AugmentKind::kReverb:
      if (spec.param1 <= 0.0 || spec.param1 > 2.0) bad("RT60 must lie in (0, 2] seconds");
      if (spec.param2 < 0.0 || spec.param2 > 100.0) bad("pre-delay must lie in [0, 100] ms");
      break;
  }
}

/// Applies one augmentation. Output length equals input length and samples
/// are clamped to [-1, 1].
inline AudioBuffer apply_augment(const AudioBuffer& buf, const AugmentSpec& spec) {
  validate(spec, buf.sample_rate());
  const auto& x = buf.samples();
  const int sr = buf.sample_rate();
  std::vector<double> y;
  switch (spec.kind) {
    case AugmentKind::kHighpass: y = detail::one_pole_highpass(x, spec.param1, sr); break;
    case AugmentKind::kLowpass: y = detail::one_pole_lowpass(x, spec.param1, sr); break;
    case AugmentKind::kCompress: y = detail::compress(x, spec.param1, spec.param2); break;
    case AugmentKind::kTimeShift: y = detail::circular_shift(x, std::llround(spec.param1)); break;
    case AugmentKind::kPitchShift: y = detail::pitch_shift(x, spec.param1); break;
    case AugmentKind::kReverb: y = detail::reverb(x, spec.param1, spec.param2, sr, spec.seed); break;
  }
  for (double& v : y) v = std::clamp(v, -1.0, 1.0);
  return AudioBuffer(std::move(y), sr);
}

// ---------------------------------------------------------------------------
// Augmentation plans: CSV "utt_id,kind,param1,param2,seed"
// ---------------------------------------------------------------------------

struct AugmentPlanRow {
  std::string utt_id;
  AugmentSpec spec;

  bool operator==(const AugmentPlanRow&) const = default;
};

inline std::string format_augment_plan(const std::vector<AugmentPlanRow>& rows) {
  std::string out = "utt_id,kind,param1,param2,seed\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%llu\n", r.spec.param1, r.spec.param2,
                  static_cast<unsigned long long>(r.spec.seed));
    out += r.utt_id + "," + std::string(to_string(r.spec.kind)) + buf;
  }
  return out;
}

inline std::vector<AugmentPlanRow> parse_augment_plan(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kBadHeader, "empty augmentation plan");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "utt_id,kind,param1,param2,seed", ErrorCode::kBadHeader,
          "bad augmentation plan header '" + line + "'");
  std::vector<AugmentPlanRow> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    const std::string where = "plan row " + std::to_string(row);
    require(f.size() == 5, ErrorCode::kBadParameter, where + ": expected 5 fields");
    const auto kind = parse_augment_kind(detail::trim(f[1]));
    require(kind.has_value(), ErrorCode::kBadParameter, where + ": unknown kind '" + f[1] + "'");
    AugmentPlanRow r{f[0], {*kind, 0.0, 0.0, 0}};
    try {
      r.spec.param1 = f[2].empty() ? 0.0 : std::stod(f[2]);
      r.spec.param2 = f[3].empty() ? 0.0 : std::stod(f[3]);
      r.spec.seed = f[4].empty() ? 0 : std::stoull(f[4]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kBadParameter, where + ": unparsable number");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace stdc
