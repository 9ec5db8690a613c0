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

#include <stdexcept>
#include <string>
#include <string_view>

namespace stdc {

/// Failure categories. The CLI prints the category name as the first token of
/// its single error line, so names are part of the external interface.
enum class ErrorCode {
  kUnsupportedFormat,
  kCorruptHeader,
  kEmptyAudio,
  kAliasedFrequency,
  kBadHeader,
  kBadLabel,
  kDuplicatePath,
  kZeroLength,
  kSignalTooShort,
  kBadFrameLength,
  kTooManyBands,
  kNonFiniteInput,
  kSpectrogramTooSmall,
  kShapeMismatch,
  kEmptySequence,
  kTooFewVectors,
  kStatsNotFitted,
  kEmptyTrainingSet,
  kSingleClassData,
  kSingleClassScores,
  kBadParameter,
  kBadConfig,
  kBadModelFile,
  kBadFeatureFile,
  kMissingModel,
  kIoFailure,
  kInvalidArgument,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptHeader: return "CorruptHeader";
    case ErrorCode::kEmptyAudio: return "EmptyAudio";
    case ErrorCode::kAliasedFrequency: return "AliasedFrequency";
    case ErrorCode::kBadHeader: return "BadHeader";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kDuplicatePath: return "DuplicatePath";
    case ErrorCode::kZeroLength: return "ZeroLength";
    case ErrorCode::kSignalTooShort: return "SignalTooShort";
    case ErrorCode::kBadFrameLength: return "BadFrameLength";
    case ErrorCode::kTooManyBands: return "TooManyBands";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kSpectrogramTooSmall: return "SpectrogramTooSmall";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kTooFewVectors: return "TooFewVectors";
    case ErrorCode::kStatsNotFitted: return "StatsNotFitted";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kSingleClassData: return "SingleClassData";
    case ErrorCode::kSingleClassScores: return "SingleClassScores";
    case ErrorCode::kBadParameter: return "BadParameter";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kBadModelFile: return "BadModelFile";
    case ErrorCode::kBadFeatureFile: return "BadFeatureFile";
    case ErrorCode::kMissingModel: return "MissingModel";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace stdc
