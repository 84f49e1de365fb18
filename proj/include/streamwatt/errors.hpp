// Copyright 2026 The streamwatt Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace streamwatt {

// Every failure class maps to a stable process exit status (see README).
enum class ErrorCode : int {
  kGeneric = 1,
  kUsage = 2,
  kUnreadableFile = 3,
  kMalformedHeader = 4,
  kEmptyDataset = 5,
  kMissingProfile = 6,
  kNonPositivePower = 7,
  kMosOutOfRange = 8,
  kInvalidSpec = 9,
  kUnwritablePath = 10,
  kIdentityViolation = 11,
  kUnknownCodec = 12,
  kNoFeasiblePoint = 13,
  kEmptyInput = 14,
  kValidation = 15,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_status() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

// Invariant violation on a single field; ingest turns these into structured
// per-row rejections instead of aborting the batch.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& reason)
      : Error(ErrorCode::kValidation, field + ": " + reason),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace streamwatt
