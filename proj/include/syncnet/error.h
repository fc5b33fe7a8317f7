/*
 * Copyright 2026 The syncnet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SYNCNET_ERROR_H_
#define SYNCNET_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace syncnet {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNotHurwitz,
  kSingularSystem,
  kSelfLoop,
  kCycleDetected,
  kUnreachable,
  kNonBinaryEntry,
  kMultipleLeaders,
  kNonPositiveParameter,
  kMatchingInfeasible,
  kNotCompanionForm,
  kDecompositionInvalid,
  kEmptyNeighborList,
  kSaturationModeDisabled,
  kPrecondition,
  kEmptyLog,
  kParseError,
  kValidationError,
  kIoError,
};

inline std::string_view ToString(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ToString(code)) + ": " + what),
        code_(code),
        detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotHurwitz: return "NotHurwitz";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kUnreachable: return "Unreachable";
    case ErrorCode::kNonBinaryEntry: return "NonBinaryEntry";
    case ErrorCode::kMultipleLeaders: return "MultipleLeaders";
    case ErrorCode::kNonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::kMatchingInfeasible: return "MatchingInfeasible";
    case ErrorCode::kNotCompanionForm: return "NotCompanionForm";
    case ErrorCode::kDecompositionInvalid: return "DecompositionInvalid";
    case ErrorCode::kEmptyNeighborList: return "EmptyNeighborList";
    case ErrorCode::kSaturationModeDisabled: return "SaturationModeDisabled";
    case ErrorCode::kPrecondition: return "Precondition";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace syncnet

#endif  // SYNCNET_ERROR_H_
