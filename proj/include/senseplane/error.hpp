// Copyright 2026 The Senseplane Authors
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
#include <string_view>

namespace senseplane {

enum class ErrorCode {
  kInvalidArgument,
  kNonFiniteInput,
  kShapeMismatch,
  kDimensionMismatch,
  kEmptyCodebook,
  kIndexOutOfRange,
  kEmptyPool,
  kNonFiniteResult,
  kOversizeSketch,
  kDuplicateDocId,
  kOversizeText,
  kEmptyIndex,
  kInvalidK,
  kNotADistribution,
  kDegenerateLabels,
  kUntrainedPredictor,
  kEmptyGrid,
  kEmptySamples,
  kInsufficientData,
  kChecksumMismatch,
  kTokenCapExceeded,
  kRedactionNotApplied,
  kLinkDown,
  kInvalidSpec,
  kConfigError,
  kTraceCorrupt,
  kIoError,
  kFormatError,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// contract violation so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace senseplane
