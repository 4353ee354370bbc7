// Copyright 2026 The RephraseTTS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rptts/common/error.h"

namespace rptts {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kCorruptAlignment: return "CorruptAlignment";
    case ErrorCode::kUnknownPhoneme: return "UnknownPhoneme";
    case ErrorCode::kNoContextAvailable: return "NoContextAvailable";
    case ErrorCode::kStoreVersionMismatch: return "StoreVersionMismatch";
    case ErrorCode::kCorruptStore: return "CorruptStore";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kOddDimension: return "OddDimension";
    case ErrorCode::kTeacherMissing: return "TeacherMissing";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::kCheckpointVersionMismatch: return "CheckpointVersionMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kMissingSegmentation: return "MissingSegmentation";
  }
  return "Unknown";
}

}  // namespace rptts
