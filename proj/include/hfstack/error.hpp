/*
 * Copyright 2026 The hfstack Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HFSTACK_ERROR_HPP_
#define HFSTACK_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hfstack {

enum class ErrorKind {
  kMissingColumn,
  kNonNumericCell,
  kMissingValue,
  kEmptyDataset,
  kMalformedCsv,
  kIo,
  kConstantColumn,
  kDimensionMismatch,
  kEmptyClass,
  kSingleClass,
  kKTooLarge,
  kEmptyInput,
  kLengthMismatch,
  kEmptySet,
  kInconsistentCounts,
  kEmptyChild,
  kDegenerateDenominator,
  kFoldTooSmall,
  kInvalidArgument,
  kConfig,
  kModelFormat,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMissingColumn: return "MissingColumn";
    case ErrorKind::kNonNumericCell: return "NonNumericCell";
    case ErrorKind::kMissingValue: return "MissingValue";
    case ErrorKind::kEmptyDataset: return "EmptyDataset";
    case ErrorKind::kMalformedCsv: return "MalformedCsv";
    case ErrorKind::kIo: return "Io";
    case ErrorKind::kConstantColumn: return "ConstantColumn";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kEmptyClass: return "EmptyClass";
    case ErrorKind::kSingleClass: return "SingleClass";
    case ErrorKind::kKTooLarge: return "KTooLarge";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kEmptySet: return "EmptySet";
    case ErrorKind::kInconsistentCounts: return "InconsistentCounts";
    case ErrorKind::kEmptyChild: return "EmptyChild";
    case ErrorKind::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::kFoldTooSmall: return "FoldTooSmall";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kConfig: return "Config";
    case ErrorKind::kModelFormat: return "ModelFormat";
  }
  return "Unknown";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hfstack

#endif  // HFSTACK_ERROR_HPP_
