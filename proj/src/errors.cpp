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

#include "streamwatt/errors.hpp"

namespace streamwatt {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kGeneric:
      return "Generic";
    case ErrorCode::kUsage:
      return "Usage";
    case ErrorCode::kUnreadableFile:
      return "UnreadableFile";
    case ErrorCode::kMalformedHeader:
      return "MalformedHeader";
    case ErrorCode::kEmptyDataset:
      return "EmptyDataset";
    case ErrorCode::kMissingProfile:
      return "MissingProfile";
    case ErrorCode::kNonPositivePower:
      return "NonPositivePower";
    case ErrorCode::kMosOutOfRange:
      return "MosOutOfRange";
    case ErrorCode::kInvalidSpec:
      return "InvalidSpec";
    case ErrorCode::kUnwritablePath:
      return "UnwritablePath";
    case ErrorCode::kIdentityViolation:
      return "IdentityViolation";
    case ErrorCode::kUnknownCodec:
      return "UnknownCodec";
    case ErrorCode::kNoFeasiblePoint:
      return "NoFeasiblePoint";
    case ErrorCode::kEmptyInput:
      return "EmptyInput";
    case ErrorCode::kValidation:
      return "Validation";
  }
  return "Unknown";
}

}  // namespace streamwatt
