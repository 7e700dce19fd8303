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

#include "senseplane/decision/types.hpp"

#include <string>

#include "senseplane/error.hpp"

namespace senseplane::decision {

std::string_view to_string(Action action) {
  switch (action) {
    case Action::kEdgeOnly: return "EdgeOnly";
    case Action::kEdgeRag: return "EdgeRag";
    case Action::kEscalate: return "Escalate";
    case Action::kAbstain: return "Abstain";
    case Action::kRejected: return "Rejected";
  }
  return "Abstain";
}

Action action_from_string(std::string_view name) {
  if (name == "EdgeOnly") return Action::kEdgeOnly;
  if (name == "EdgeRag") return Action::kEdgeRag;
  if (name == "Escalate") return Action::kEscalate;
  if (name == "Abstain") return Action::kAbstain;
  if (name == "Rejected") return Action::kRejected;
  fail(ErrorCode::kFormatError, "unknown action: " + std::string(name));
}

std::string_view to_string(QuantLevel level) {
  switch (level) {
    case QuantLevel::kFp16: return "fp16";
    case QuantLevel::kInt8: return "int8";
    case QuantLevel::kInt4: return "int4";
  }
  return "fp16";
}

QuantLevel quant_level_from_string(std::string_view name) {
  if (name == "fp16") return QuantLevel::kFp16;
  if (name == "int8") return QuantLevel::kInt8;
  if (name == "int4") return QuantLevel::kInt4;
  fail(ErrorCode::kFormatError, "unknown quantization level: " + std::string(name));
}

}  // namespace senseplane::decision
