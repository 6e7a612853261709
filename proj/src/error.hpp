/*
 * Copyright 2026 The epialign Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EPIALIGN_ERROR_HPP_
#define EPIALIGN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace epialign {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateRotation6D,
  kDegenerateBaseline,
  kDegenerateEpipolarLine,
  kInvalidDepth,
  kInsufficientFrames,
  kEmptyResiduals,
  kMissingConfidence,
  kZeroTotalWeight,
  kInsufficientCorrespondences,
  kFrameMismatch,
  kEmptySequence,
  kDegenerateTrajectory,
  kEmptyCloud,
  kMissingDepthMap,
  kNoCovisibility,
  kParseError,
  kVersionMismatch,
  kRotationInvalid,
  kIoError,
  kInvalidCorrespondence,
};

std::string_view ErrorCodeName(ErrorCode code);

// Numerical failures map to a different CLI exit code than data errors.
bool IsNumericalFailure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace epialign

#endif  // EPIALIGN_ERROR_HPP_
