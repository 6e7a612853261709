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

#include "error.hpp"

namespace epialign {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateRotation6D: return "DegenerateRotation6D";
    case ErrorCode::kDegenerateBaseline: return "DegenerateBaseline";
    case ErrorCode::kDegenerateEpipolarLine: return "DegenerateEpipolarLine";
    case ErrorCode::kInvalidDepth: return "InvalidDepth";
    case ErrorCode::kInsufficientFrames: return "InsufficientFrames";
    case ErrorCode::kEmptyResiduals: return "EmptyResiduals";
    case ErrorCode::kMissingConfidence: return "MissingConfidence";
    case ErrorCode::kZeroTotalWeight: return "ZeroTotalWeight";
    case ErrorCode::kInsufficientCorrespondences:
      return "InsufficientCorrespondences";
    case ErrorCode::kFrameMismatch: return "FrameMismatch";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kDegenerateTrajectory: return "DegenerateTrajectory";
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kMissingDepthMap: return "MissingDepthMap";
    case ErrorCode::kNoCovisibility: return "NoCovisibility";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kRotationInvalid: return "RotationInvalid";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidCorrespondence: return "InvalidCorrespondence";
  }
  return "Unknown";
}

bool IsNumericalFailure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateRotation6D:
    case ErrorCode::kDegenerateBaseline:
    case ErrorCode::kDegenerateEpipolarLine:
    case ErrorCode::kInvalidDepth:
    case ErrorCode::kZeroTotalWeight:
    case ErrorCode::kDegenerateTrajectory:
      return true;
    default:
      return false;
  }
}

}  // namespace epialign
