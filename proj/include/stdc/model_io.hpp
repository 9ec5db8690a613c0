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

// Parameter container: magic "STDC", u16 version, then one record per tensor
// until end of file: u32 name length, name bytes, u32 rows, u32 cols,
// rows*cols float32 values. All integers little-endian.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stdc/binary_io.hpp"
#include "stdc/tensor.hpp"

namespace stdc {

inline constexpr std::string_view kModelMagic = "STDC";
inline constexpr std::uint16_t kModelVersion = 1;

using TensorMap = std::map<std::string, Tensor2>;

template <typename Params>
void append_tensors(std::vector<std::pair<std::string, Tensor2>>& records, const Params& params) {
  params.for_each_tensor(
      [&](const std::string& name, const Tensor2& t) { records.emplace_back(name, t); });
}

inline Bytes encode_tensors(const std::vector<std::pair<std::string, Tensor2>>& records) {
  ByteWriter out;
  out.raw(kModelMagic);
  out.u16(kModelVersion);
  for (const auto& [name, t] : records) {
    out.u32(static_cast<std::uint32_t>(name.size()));
    out.raw(name);
    out.u32(static_cast<std::uint32_t>(t.rows()));
    out.u32(static_cast<std::uint32_t>(t.cols()));
    for (double v : t.data()) out.f32(static_cast<float>(v));
  }
  return out.take();
}

inline TensorMap decode_tensors(const Bytes& bytes) {
  ByteReader in(bytes, ErrorCode::kBadModelFile);
  require(bytes.size() >= 6 && in.raw(4) == kModelMagic, ErrorCode::kBadModelFile,
          "missing STDC magic");
  const auto version = in.u16();
  require(version == kModelVersion, ErrorCode::kBadModelFile,
          "unsupported model version " + std::to_string(version));
  TensorMap map;
  while (!in.at_end()) {
    const auto len = in.u32();
    std::string name = in.raw(len);
    const auto rows = in.u32();
    const auto cols = in.u32();
    require(static_cast<std::uint64_t>(rows) * cols * 4 <= in.remaining(),
            ErrorCode::kBadModelFile, "tensor '" + name + "' truncated");
    Tensor2 t(rows, cols);
    for (double& v : t.data()) v = static_cast<double>(in.f32());
    require(map.emplace(name, std::move(t)).second, ErrorCode::kBadModelFile,
            "duplicate tensor '" + name + "'");
  }
  return map;
}

/// Fills every tensor of `params` from the map, checking names and shapes.
template <typename Params>
void assign_tensors(Params& params, const TensorMap& map) {
  params.for_each_tensor([&](const std::string& name, Tensor2& t) {
    const auto it = map.find(name);
    require(it != map.end(), ErrorCode::kBadModelFile, "missing tensor '" + name + "'");
    require(it->second.rows() == t.rows() && it->second.cols() == t.cols(),
            ErrorCode::kBadModelFile, "tensor '" + name + "' has the wrong shape");
    t = it->second;
  });
}

inline TensorMap load_tensor_file(const std::filesystem::path& path) {
  require(std::filesystem::exists(path), ErrorCode::kMissingModel,
          "model file " + path.string() + " does not exist");
  return decode_tensors(read_file_bytes(path));
}

template <typename... Params>
void save_params(const std::filesystem::path& path, const Params&... params) {
  std::vector<std::pair<std::string, Tensor2>> records;
  (append_tensors(records, params), ...);
  write_file_bytes(path, encode_tensors(records));
}

}  // namespace stdc
