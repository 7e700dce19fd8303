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

#include "senseplane/error.hpp"

namespace senseplane {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyCodebook: return "EmptyCodebook";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kNonFiniteResult: return "NonFiniteResult";
    case ErrorCode::kOversizeSketch: return "OversizeSketch";
    case ErrorCode::kDuplicateDocId: return "DuplicateDocId";
    case ErrorCode::kOversizeText: return "OversizeText";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kNotADistribution: return "NotADistribution";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kUntrainedPredictor: return "UntrainedPredictor";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
    case ErrorCode::kEmptySamples: return "EmptySamples";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kTokenCapExceeded: return "TokenCapExceeded";
    case ErrorCode::kRedactionNotApplied: return "RedactionNotApplied";
    case ErrorCode::kLinkDown: return "LinkDown";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kTraceCorrupt: return "TraceCorrupt";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace senseplane
