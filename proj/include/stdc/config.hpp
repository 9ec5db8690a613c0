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

#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>

#include "stdc/audio_io.hpp"
#include "stdc/binary_io.hpp"
#include "stdc/classifier.hpp"
#include "stdc/fft.hpp"
#include "stdc/tensor.hpp"

namespace stdc {

/// Run configuration. Loaded from plain-text `key = value` lines; `#` starts
/// a comment.
struct PipelineConfig {
  int sample_rate = 16000;
  std::size_t n_fft = 2048;
  std::size_t hop = 512;
  std::size_t n_mels = 128;
  std::size_t max_frames = 256;
  std::size_t stc_hidden = 64;
  std::uint64_t seed = 1;
  std::filesystem::path model_dir = "models";
  std::filesystem::path cache_dir;  // empty disables the SDC cache
  std::size_t workers = 1;
  HeadVariant head = HeadVariant::kMlp;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 1e-4;
  double weight_decay = 1e-3;

  TrainOptions train_options() const {
    TrainOptions o;
    o.epochs = epochs;
    o.batch_size = batch_size;
    o.adam.learning_rate = learning_rate;
    o.adam.weight_decay = weight_decay;
    return o;
  }

  /// Minimum signal length for a 3x3-codable spectrogram (three frames).
  std::size_t min_samples() const { return n_fft + 2 * hop; }

  /// Hash of the settings that change extracted SDC values.
  std::uint64_t feature_hash() const {
    std::ostringstream s;
    s << "sr=" << sample_rate << ";n_fft=" << n_fft << ";hop=" << hop << ";n_mels=" << n_mels;
    return fnv1a(s.str());
  }
};

inline void validate(const PipelineConfig& c) {
  const auto bad = [](const std::string& m) { throw Error(ErrorCode::kBadConfig, m); };
  if (c.sample_rate <= 0) bad("sample_rate must be positive");
  if (!is_power_of_two(c.n_fft)) bad("n_fft must be a power of two");
  if (c.hop == 0) bad("hop must be positive");
  if (c.n_mels < 3) bad("n_mels must be at least 3");
  if (c.n_mels - 2 > 2 * 128) bad("n_mels must not exceed 258");
  if (c.max_frames == 0) bad("max_frames must be positive");
  if (c.stc_hidden == 0) bad("stc_hidden must be positive");
  if (c.workers == 0) bad("workers must be positive");
  if (c.epochs == 0) bad("epochs must be positive");
  if (c.batch_size == 0) bad("batch_size must be positive");
  if (!(c.learning_rate > 0.0)) bad("learning_rate must be positive");
  if (!(c.weight_decay >= 0.0)) bad("weight_decay must be non-negative");
}

inline PipelineConfig parse_config(std::string_view text, PipelineConfig c = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineno);
    require(eq != std::string::npos, ErrorCode::kBadConfig, where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "sample_rate") c.sample_rate = std::stoi(value);
      else if (key == "n_fft") c.n_fft = std::stoull(value);
      else if (key == "hop") c.hop = std::stoull(value);
      else if (key == "n_mels") c.n_mels = std::stoull(value);
      else if (key == "max_frames") c.max_frames = std::stoull(value);
      else if (key == "stc_hidden") c.stc_hidden = std::stoull(value);
      else if (key == "seed") c.seed = std::stoull(value);
      else if (key == "model_dir") c.model_dir = value;
      else if (key == "cache_dir") c.cache_dir = value;
      else if (key == "workers") c.workers = std::stoull(value);
      else if (key == "epochs") c.epochs = std::stoull(value);
      else if (key == "batch_size") c.batch_size = std::stoull(value);
      else if (key == "learning_rate") c.learning_rate = std::stod(value);
      else if (key == "weight_decay") c.weight_decay = std::stod(value);
      else if (key == "head") {
        const auto v = parse_head_variant(value);
        require(v.has_value(), ErrorCode::kBadConfig, where + ": head must be mlp or logistic");
        c.head = *v;
      } else {
        throw Error(ErrorCode::kBadConfig, where + ": unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kBadConfig, where + ": bad value '" + value + "' for " + key);
    }
  }
  validate(c);
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace stdc
