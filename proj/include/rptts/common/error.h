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

#ifndef RPTTS_COMMON_ERROR_H_
#define RPTTS_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace rptts {

enum class ErrorCode {
  kInvalidInput,
  kInvalidConfig,
  kIoError,
  kCorruptAlignment,
  kUnknownPhoneme,
  kNoContextAvailable,
  kStoreVersionMismatch,
  kCorruptStore,
  kShapeError,
  kOddDimension,
  kTeacherMissing,
  kConfigMismatch,
  kCorruptCheckpoint,
  kCheckpointVersionMismatch,
  kNonFiniteLoss,
  kMissingSegmentation,
};

const char* error_code_name(ErrorCode code);

// All library failures surface as this exception; `code()` lets callers and
// tests discriminate without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rptts

#endif  // RPTTS_COMMON_ERROR_H_
