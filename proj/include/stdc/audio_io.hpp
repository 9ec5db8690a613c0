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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stdc/binary_io.hpp"
#include "stdc/error.hpp"

namespace stdc {

/// Mono PCM signal. Construction enforces the invariants every downstream
/// stage relies on: non-empty, positive rate, finite samples.
class AudioBuffer {
 public:
  AudioBuffer(std::vector<double> samples, int sample_rate)
      : samples_(std::move(samples)), sample_rate_(sample_rate) {
    require(sample_rate_ > 0, ErrorCode::kInvalidArgument,
            "sample rate must be positive");
    require(!samples_.empty(), ErrorCode::kEmptyAudio, "buffer has no samples");
    require(std::all_of(samples_.begin(), samples_.end(),
                        [](double x) { return std::isfinite(x); }),
            ErrorCode::kNonFiniteInput, "buffer contains NaN or Inf");
  }

  const std::vector<double>& samples() const noexcept { return samples_; }
  int sample_rate() const noexcept { return sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

  bool operator==(const AudioBuffer&) const = default;

 private:
  std::vector<double> samples_;
  int sample_rate_;
};

// ---------------------------------------------------------------------------
// WAV
// ---------------------------------------------------------------------------

enum class WavEncoding { kPcm16, kFloat32 };

namespace detail {

constexpr std::uint16_t kWaveFormatPcm = 0x0001;
constexpr std::uint16_t kWaveFormatFloat = 0x0003;
constexpr std::uint16_t kWaveFormatExtensible = 0xFFFE;

}  // namespace detail

/// Decodes an in-memory RIFF/WAVE image. Chunks other than `fmt ` and `data`
/// are skipped.
inline AudioBuffer decode_wav(const Bytes& bytes) {
  ByteReader in(bytes, ErrorCode::kCorruptHeader);
  require(bytes.size() >= 12, ErrorCode::kCorruptHeader, "file too small for RIFF header");
  require(in.raw(4) == "RIFF", ErrorCode::kCorruptHeader, "missing RIFF tag");
  in.u32();
  require(in.raw(4) == "WAVE", ErrorCode::kCorruptHeader, "missing WAVE tag");

  std::optional<std::uint16_t> format;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  std::optional<std::pair<std::size_t, std::size_t>> data;  // offset, length

  while (in.remaining() >= 8) {
    const std::string id = in.raw(4);
    const std::uint32_t size = in.u32();
    const std::size_t start = in.position();
    require(size <= in.remaining(), ErrorCode::kCorruptHeader,
            "chunk '" + id + "' runs past end of file");
    if (id == "fmt ") {
      require(size >= 16, ErrorCode::kCorruptHeader, "fmt chunk too short");
      std::uint16_t tag = in.u16();
      channels = in.u16();
      sample_rate = in.u32();
      in.u32();  // byte rate
      in.u16();  // block align
      bits = in.u16();
      if (tag == detail::kWaveFormatExtensible) {
        require(size >= 40, ErrorCode::kCorruptHeader, "extensible fmt chunk too short");
        in.u16();  // cbSize
        in.u16();  // valid bits
        in.u32();  // channel mask
        tag = in.u16();  // first two bytes of the subformat GUID
      }
      format = tag;
      in.skip(size - (in.position() - start));
    } else if (id == "data") {
      data = std::make_pair(start, static_cast<std::size_t>(size));
      in.skip(size);
    } else {
      in.skip(size);
    }
    if (size % 2 == 1 && in.remaining() > 0) in.skip(1);
  }

  require(format.has_value(), ErrorCode::kCorruptHeader, "missing fmt chunk");
  require(data.has_value(), ErrorCode::kCorruptHeader, "missing data chunk");
  const bool pcm16 = *format == detail::kWaveFormatPcm && bits == 16;
  const bool float32 = *format == detail::kWaveFormatFloat && bits == 32;
  require(pcm16 || float32, ErrorCode::kUnsupportedFormat,
          "only PCM16 and float32 are supported (format tag " +
              std::to_string(*format) + ", " + std::to_string(bits) + " bits)");
  require(channels == 1 || channels == 2, ErrorCode::kUnsupportedFormat,
          std::to_string(channels) + " channels; only mono and stereo are supported");
  require(sample_rate > 0, ErrorCode::kCorruptHeader, "zero sample rate");

  const std::size_t frame_bytes = static_cast<std::size_t>(bits / 8) * channels;
  const std::size_t frames = data->second / frame_bytes;
  require(frames > 0, ErrorCode::kEmptyAudio, "data chunk holds no samples");

  std::vector<double> mono(frames);
  const std::uint8_t* p = bytes.data() + data->first;
  for (std::size_t f = 0; f < frames; ++f) {
    double sum = 0.0;
    for (std::uint16_t ch = 0; ch < channels; ++ch) {
      const std::uint8_t* s = p + f * frame_bytes + ch * (bits / 8);
      if (pcm16) {
        const auto v = static_cast<std::int16_t>(s[0] | (s[1] << 8));
        sum += v / 32768.0;
      } else {
        const std::uint32_t u = static_cast<std::uint32_t>(s[0]) |
                                (static_cast<std::uint32_t>(s[1]) << 8) |
                                (static_cast<std::uint32_t>(s[2]) << 16) |
                                (static_cast<std::uint32_t>(s[3]) << 24);
        sum += static_cast<double>(std::bit_cast<float>(u));
      }
    }
    mono[f] = sum / channels;
  }
  return AudioBuffer(std::move(mono), static_cast<int>(sample_rate));
}

inline AudioBuffer load_wav(const std::filesystem::path& path) {
  return decode_wav(read_file_bytes(path));
}

/// Encodes interleaved channel data; `channels` > 1 interleaves the given
/// per-channel vectors (all of equal length).
inline Bytes encode_wav(const std::vector<std::vector<double>>& channels,
                        int sample_rate, WavEncoding encoding) {
  require(!channels.empty(), ErrorCode::kInvalidArgument, "no channels");
  const std::size_t frames = channels.front().size();
  for (const auto& ch : channels)
    require(ch.size() == frames, ErrorCode::kShapeMismatch, "channel lengths differ");

  const std::uint16_t n_ch = static_cast<std::uint16_t>(channels.size());
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint32_t block = n_ch * (bits / 8);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * block);

  ByteWriter out;
  out.raw("RIFF");
  out.u32(36 + data_bytes);
  out.raw("WAVE");
  out.raw("fmt ");
  out.u32(16);
  out.u16(encoding == WavEncoding::kPcm16 ? detail::kWaveFormatPcm
                                          : detail::kWaveFormatFloat);
  out.u16(n_ch);
  out.u32(static_cast<std::uint32_t>(sample_rate));
  out.u32(static_cast<std::uint32_t>(sample_rate) * block);
  out.u16(static_cast<std::uint16_t>(block));
  out.u16(bits);
  out.raw("data");
  out.u32(data_bytes);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto& ch : channels) {
      if (encoding == WavEncoding::kPcm16) {
        const double scaled = std::clamp(std::round(ch[f] * 32768.0), -32768.0, 32767.0);
        out.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
      } else {
        out.f32(static_cast<float>(ch[f]));
      }
    }
  }
  return out.take();
}

inline void save_wav(const std::filesystem::path& path, const AudioBuffer& buf,
                     WavEncoding encoding = WavEncoding::kPcm16) {
  write_file_bytes(path, encode_wav({buf.samples()}, buf.sample_rate(), encoding));
}

// ---------------------------------------------------------------------------
// Synthesis and resampling
// ---------------------------------------------------------------------------

/// h·sin(2π f1 t) + l·sin(2π f2 t), sampled at `sample_rate`.
inline AudioBuffer synth_two_tone(double h, double l, double f1, double f2,
                                  double duration, int sample_rate) {
  require(sample_rate > 0, ErrorCode::kInvalidArgument, "sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  require(f1 < nyquist && f2 < nyquist, ErrorCode::kAliasedFrequency,
          "tone frequency at or above Nyquist");
  require(duration > 0.0, ErrorCode::kInvalidArgument, "duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  require(n > 0, ErrorCode::kEmptyAudio, "duration shorter than one sample");
  std::vector<double> s(n);
  const double w1 = 2.0 * std::numbers::pi * f1 / sample_rate;
  const double w2 = 2.0 * std::numbers::pi * f2 / sample_rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    s[i] = h * std::sin(w1 * t) + l * std::sin(w2 * t);
  }
  return AudioBuffer(std::move(s), sample_rate);
}

/// Linear-interpolation resampler. Output length is
/// floor(size · target / source); identical rates return the input unchanged.
inline AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
  require(target_rate > 0, ErrorCode::kInvalidArgument, "target rate must be positive");
  if (target_rate == buf.sample_rate()) return buf;
  const auto& x = buf.samples();
  const std::size_t out_len = static_cast<std::size_t>(
      (static_cast<std::uint64_t>(x.size()) * static_cast<std::uint64_t>(target_rate)) /
      static_cast<std::uint64_t>(buf.sample_rate()));
  require(out_len > 0, ErrorCode::kEmptyAudio, "resampled buffer would be empty");
  const double step = static_cast<double>(buf.sample_rate()) / target_rate;
  std::vector<double> y(out_len);
  for (std::size_t n = 0; n < out_len; ++n) {
    const double pos = n * step;
    const auto i = std::min(static_cast<std::size_t>(pos), x.size() - 1);
    const double frac = pos - static_cast<double>(i);
    const double next = x[std::min(i + 1, x.size() - 1)];
    y[n] = frac == 0.0 ? x[i] : x[i] + frac * (next - x[i]);
  }
  return AudioBuffer(std::move(y), target_rate);
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

enum class Label { kBonaFide, kSpoof };
enum class Subset { kTrain, kDev, kEval };

constexpr std::string_view to_string(Label label) {
  return label == Label::kBonaFide ? "bona_fide" : "spoof";
}

constexpr std::string_view to_string(Subset subset) {
  switch (subset) {
    case Subset::kTrain: return "train";
    case Subset::kDev: return "dev";
    case Subset::kEval: return "eval";
  }
  return "";
}

namespace detail {

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

}  // namespace detail

inline std::optional<Label> parse_label(std::string_view token) {
  const auto t = detail::lowercase(detail::trim(token));
  if (t == "bona_fide" || t == "bonafide") return Label::kBonaFide;
  if (t == "spoof") return Label::kSpoof;
  return std::nullopt;
}

inline std::optional<Subset> parse_subset(std::string_view token) {
  const auto t = detail::lowercase(detail::trim(token));
  if (t == "train") return Subset::kTrain;
  if (t == "dev") return Subset::kDev;
  if (t == "eval") return Subset::kEval;
  return std::nullopt;
}

struct ManifestEntry {
  std::string path;
  Label label = Label::kBonaFide;
  Subset subset = Subset::kTrain;
  std::optional<std::string> attack_tag;

  bool operator==(const ManifestEntry&) const = default;
};

inline constexpr std::string_view kManifestHeader = "path,label,subset,attack_tag";

/// Parses manifest CSV text. Fields are unquoted; paths must not contain commas.
inline std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> entries;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header_seen = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      require(line == kManifestHeader, ErrorCode::kBadHeader,
              "expected header '" + std::string(kManifestHeader) + "', got '" + line + "'");
      header_seen = true;
      continue;
    }
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    require(fields.size() == 3 || fields.size() == 4, ErrorCode::kBadLabel,
            "row " + std::to_string(row) + ": expected 4 fields, got " +
                std::to_string(fields.size()));
    ManifestEntry e;
    e.path = detail::trim(fields[0]);
    require(!e.path.empty(), ErrorCode::kBadLabel, "row " + std::to_string(row) + ": empty path");
    const auto label = parse_label(fields[1]);
    require(label.has_value(), ErrorCode::kBadLabel,
            "row " + std::to_string(row) + ": unknown label '" + fields[1] + "'");
    const auto subset = parse_subset(fields[2]);
    require(subset.has_value(), ErrorCode::kBadLabel,
            "row " + std::to_string(row) + ": unknown subset '" + fields[2] + "'");
    e.label = *label;
    e.subset = *subset;
    if (fields.size() == 4) {
      auto tag = detail::trim(fields[3]);
      if (!tag.empty()) e.attack_tag = std::move(tag);
    }
    require(seen.insert(e.path).second, ErrorCode::kDuplicatePath,
            "row " + std::to_string(row) + ": duplicate path '" + e.path + "'");
    entries.push_back(std::move(e));
  }
  require(header_seen, ErrorCode::kBadHeader, "manifest is empty (no header)");
  return entries;
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_manifest(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& e : entries) {
    out += e.path;
    out += ',';
    out += to_string(e.label);
    out += ',';
    out += to_string(e.subset);
    out += ',';
    out += e.attack_tag.value_or("");
    out += '\n';
  }
  return out;
}

inline void write_manifest(const std::filesystem::path& path,
                           const std::vector<ManifestEntry>& entries) {
  const auto text = format_manifest(entries);
  write_file_bytes(path, Bytes(text.begin(), text.end()));
}

}  // namespace stdc
