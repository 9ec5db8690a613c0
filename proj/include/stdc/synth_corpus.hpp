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
 * Desk-scale surrogate corpus. Bona fide utterances are two-tone signals with
 * a syllable-rate amplitude envelope and a light noise floor. Spoofs start
 * from the same kind of genuine render and then:
 *   full     - the whole utterance is re-rendered by the "synthesizer": a
 *              flattened envelope and an upper tone shifted off the speaker's
 *              range
 *   partial  - a contiguous head or tail segment (a configured fraction of
 *              the duration) is replaced by that synthesizer render
 *   replay   - second harmonics of both tones are added, as from a
 *              loudspeaker/microphone chain
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "stdc/audio_io.hpp"
#include "stdc/random.hpp"

namespace stdc {

enum class SpoofStyle { kNone, kFull, kPartial, kReplay };

constexpr std::string_view to_string(SpoofStyle s) {
  switch (s) {
    case SpoofStyle::kNone: return "";
    case SpoofStyle::kFull: return "full";
    case SpoofStyle::kPartial: return "partial";
    case SpoofStyle::kReplay: return "replay";
  }
  return "";
}

struct SynthOptions {
  std::size_t count = 400;
  std::uint64_t seed = 1;
  double duration = 1.5;  // seconds
  int sample_rate = 16000;
  double partial_fraction = 0.4;
};

/// Everything needed to re-render one utterance bit-exactly.
struct UtterancePlan {
  std::size_t index = 0;
  Label label = Label::kBonaFide;
  SpoofStyle style = SpoofStyle::kNone;
  std::size_t length = 0;  // samples
  int sample_rate = 16000;
  double f_high = 0, f_low = 0;
  double amp_high = 0, amp_low = 0;
  double phase_high = 0, phase_low = 0;
  double env_rate = 0, env_phase = 0, env_depth = 0;
  double noise_level = 0;
  std::uint64_t noise_seed = 0;
  std::size_t splice_start = 0;   // partial only
  std::size_t splice_length = 0;  // partial only
  double high_shift = 1.0;        // multiplier on f_high inside synthesized regions
  double harmonic_amp = 0.0;      // replay only
};

inline UtterancePlan plan_utterance(const SynthOptions& opt, std::size_t index) {
  Rng rng(derive_seed(opt.seed, index));
  UtterancePlan p;
  p.index = index;
  p.sample_rate = opt.sample_rate;
  p.length = static_cast<std::size_t>(std::llround(opt.duration * opt.sample_rate));
  p.label = index % 2 == 0 ? Label::kBonaFide : Label::kSpoof;
  if (p.label == Label::kSpoof) {
    constexpr SpoofStyle kStyles[] = {SpoofStyle::kFull, SpoofStyle::kPartial, SpoofStyle::kReplay};
    p.style = kStyles[(index / 2) % 3];
  }
  // Narrow "speaker" ranges; the synthesizer's shifted tone falls outside them.
  p.f_high = rng.uniform(1900.0, 2300.0);
  p.f_low = rng.uniform(180.0, 240.0);
  p.amp_high = rng.uniform(0.25, 0.45);
  p.amp_low = rng.uniform(0.25, 0.45);
  p.phase_high = rng.uniform(0.0, 2.0 * std::numbers::pi);
  p.phase_low = rng.uniform(0.0, 2.0 * std::numbers::pi);
  p.env_rate = rng.uniform(2.0, 5.0);
  p.env_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  p.env_depth = rng.uniform(0.6, 0.9);
  p.noise_level = rng.uniform(0.003, 0.01);
  p.noise_seed = rng.next();
  const double splice_draw = rng.uniform();
  p.high_shift = rng.uniform(1.2, 1.4);
  p.harmonic_amp = rng.uniform(0.1, 0.2);
  if (p.style == SpoofStyle::kPartial) {
    p.splice_length = static_cast<std::size_t>(std::floor(opt.partial_fraction * static_cast<double>(p.length)));
    // Spliced onto the head or the tail of the genuine utterance.
    p.splice_start = splice_draw < 0.5 ? 0 : p.length - p.splice_length;
  }
  return p;
}

namespace detail {

inline double envelope(const UtterancePlan& p, double t) {
  return 1.0 - p.env_depth * (0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * p.env_rate * t + p.env_phase));
}

/// Mean of the natural envelope, used by the flattened renders.
inline double flat_envelope(const UtterancePlan& p) { return 1.0 - 0.5 * p.env_depth; }

inline std::vector<double> noise_track(const UtterancePlan& p) {
  Rng rng(p.noise_seed);
  std::vector<double> n(p.length);
  for (double& v : n) v = p.noise_level * rng.normal();
  return n;
}

}  // namespace detail

/// The genuine signal an utterance is built from (equals the final render for
/// bona fide utterances).
inline std::vector<double> render_genuine(const UtterancePlan& p) {
  const auto noise = detail::noise_track(p);
  std::vector<double> s(p.length);
  const double w_high = 2.0 * std::numbers::pi * p.f_high / p.sample_rate;
  const double w_low = 2.0 * std::numbers::pi * p.f_low / p.sample_rate;
  for (std::size_t n = 0; n < p.length; ++n) {
    const double t = static_cast<double>(n) / p.sample_rate;
    const double tones = p.amp_high * std::sin(w_high * n + p.phase_high) +
                         p.amp_low * std::sin(w_low * n + p.phase_low);
    s[n] = detail::envelope(p, t) * tones + noise[n];
  }
  return s;
}

inline std::vector<double> render(const UtterancePlan& p) {
  std::vector<double> s = render_genuine(p);
  const auto noise = detail::noise_track(p);
  const double w_high = 2.0 * std::numbers::pi * p.f_high / p.sample_rate;
  const double w_low = 2.0 * std::numbers::pi * p.f_low / p.sample_rate;
  const double flat = detail::flat_envelope(p);
  const double w_shift = w_high * p.high_shift;
  const auto synthesize = [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n)
      s[n] = flat * (p.amp_high * std::sin(w_shift * n + p.phase_high) +
                     p.amp_low * std::sin(w_low * n + p.phase_low)) +
             noise[n];
  };
  switch (p.style) {
    case SpoofStyle::kNone:
      break;
    case SpoofStyle::kFull:
      synthesize(0, p.length);
      break;
    case SpoofStyle::kPartial:
      synthesize(p.splice_start, p.splice_start + p.splice_length);
      break;
    case SpoofStyle::kReplay:
      for (std::size_t n = 0; n < p.length; ++n) {
        const double t = static_cast<double>(n) / p.sample_rate;
        s[n] += detail::envelope(p, t) * p.harmonic_amp *
                (std::sin(2.0 * (w_high * n + p.phase_high)) + std::sin(2.0 * (w_low * n + p.phase_low)));
      }
      break;
  }
  for (double& v : s) v = std::clamp(v, -1.0, 1.0);
  return s;
}

inline std::string utterance_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "utt_%05zu.wav", index);
  return buf;
}

/// Splits each class 60/20/20 into train/dev/eval after a seeded shuffle.
inline std::vector<ManifestEntry> plan_manifest(const SynthOptions& opt,
                                                const std::vector<UtterancePlan>& plans) {
  std::vector<ManifestEntry> entries(plans.size());
  for (const auto& p : plans) {
    auto& e = entries[p.index];
    e.path = utterance_file_name(p.index);
    e.label = p.label;
    if (p.style != SpoofStyle::kNone) e.attack_tag = std::string(to_string(p.style));
  }
  Rng rng(derive_seed(opt.seed, 0xC0FFEE));
  for (Label label : {Label::kBonaFide, Label::kSpoof}) {
    std::vector<std::size_t> members;
    for (const auto& p : plans)
      if (p.label == label) members.push_back(p.index);
    rng.shuffle(members);
    const std::size_t n = members.size();
    const std::size_t n_train = (n * 6) / 10;
    const std::size_t n_dev = (n * 2) / 10;
    for (std::size_t i = 0; i < n; ++i)
      entries[members[i]].subset = i < n_train ? Subset::kTrain
                                   : i < n_train + n_dev ? Subset::kDev
                                                         : Subset::kEval;
  }
  return entries;
}

/// Writes `count` PCM16 WAV files plus manifest.csv into `out_dir`.
inline std::vector<ManifestEntry> write_synthetic_corpus(const std::filesystem::path& out_dir,
                                                         const SynthOptions& opt) {
  require(opt.count >= 2, ErrorCode::kInvalidArgument, "corpus needs at least 2 utterances");
  require(opt.partial_fraction > 0.0 && opt.partial_fraction < 1.0, ErrorCode::kInvalidArgument,
          "partial fraction must lie in (0, 1)");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, ErrorCode::kIoFailure, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<UtterancePlan> plans;
  for (std::size_t i = 0; i < opt.count; ++i) plans.push_back(plan_utterance(opt, i));
  for (const auto& p : plans)
    save_wav(out_dir / utterance_file_name(p.index), AudioBuffer(render(p), p.sample_rate));
  auto entries = plan_manifest(opt, plans);
  write_manifest(out_dir / "manifest.csv", entries);
  return entries;
}

}  // namespace stdc
