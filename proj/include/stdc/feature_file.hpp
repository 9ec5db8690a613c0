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

// Feature container: magic "SDCF", u16 version, u8 kind (1 SDC, 2 STC,
// 3 STDC), u32 count, u32 dim, count*dim float32 values (row per utterance),
// then count utterance ids as u32 byte length + UTF-8 bytes. Little-endian.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stdc/binary_io.hpp"
#include "stdc/features.hpp"
#include "stdc/tensor.hpp"

namespace stdc {

inline constexpr std::string_view kFeatureMagic = "SDCF";
inline constexpr std::uint16_t kFeatureVersion = 1;

struct FeatureSet {
  FeatureKind kind = FeatureKind::kSdc;
  Tensor2 values{0, kFeatureDim};  // count x dim
  std::vector<std::string> ids;

  std::size_t count() const noexcept { return values.rows(); }
  std::size_t dim() const noexcept { return values.cols(); }
  bool operator==(const FeatureSet&) const = default;
};

inline Bytes encode_features(const FeatureSet& set) {
  require(set.ids.size() == set.count(), ErrorCode::kShapeMismatch, "feature id count mismatch");
  require(set.dim() == kFeatureDim, ErrorCode::kShapeMismatch, "feature vectors must be 128-D");
  ByteWriter out;
  out.raw(kFeatureMagic);
  out.u16(kFeatureVersion);
  out.u8(static_cast<std::uint8_t>(set.kind));
  out.u32(static_cast<std::uint32_t>(set.count()));
  out.u32(static_cast<std::uint32_t>(set.dim()));
  for (double v : set.values.data()) out.f32(static_cast<float>(v));
  for (const auto& id : set.ids) {
    out.u32(static_cast<std::uint32_t>(id.size()));
    out.raw(id);
  }
  return out.take();
}

inline FeatureSet decode_features(const Bytes& bytes) {
  ByteReader in(bytes, ErrorCode::kBadFeatureFile);
  require(bytes.size() >= 4 && in.raw(4) == kFeatureMagic, ErrorCode::kBadFeatureFile,
          "missing SDCF magic");
  const auto version = in.u16();
  require(version == kFeatureVersion, ErrorCode::kBadFeatureFile,
          "unsupported feature file version " + std::to_string(version));
  const auto kind = in.u8();
  require(kind >= 1 && kind <= 3, ErrorCode::kBadFeatureFile, "unknown feature kind " + std::to_string(kind));
  const auto count = in.u32();
  const auto dim = in.u32();
  require(dim == kFeatureDim, ErrorCode::kBadFeatureFile, "feature dim must be 128");
  require(static_cast<std::uint64_t>(count) * dim * 4 <= in.remaining(), ErrorCode::kBadFeatureFile,
          "payload shorter than header claims");
  FeatureSet set;
  set.kind = static_cast<FeatureKind>(kind);
  set.values = Tensor2(count, dim);
  for (double& v : set.values.data()) v = static_cast<double>(in.f32());
  set.ids.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) set.ids.push_back(in.raw(in.u32()));
  require(in.at_end(), ErrorCode::kBadFeatureFile, "trailing bytes after feature records");
  return set;
}

inline void write_features(const std::filesystem::path& path, const FeatureSet& set) {
  write_file_bytes(path, encode_features(set));
}

inline FeatureSet read_features(const std::filesystem::path& path) {
  return decode_features(read_file_bytes(path));
}

}  // namespace stdc
