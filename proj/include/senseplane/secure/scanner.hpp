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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "senseplane/secure/redactor.hpp"

namespace senseplane::secure {

struct ScanResult {
  std::size_t pii_matches = 0;
  std::size_t raw_value_matches = 0;
  bool clean() const { return pii_matches == 0 && raw_value_matches == 0; }
};

// A decimal number found in free text. `unit` is the place value of its last
// digit, so any rendering of v with |v - value| <= unit could have produced it.
struct NumericToken {
  double value = 0.0;
  double unit = 0.0;
  std::size_t significant_digits = 0;
};

std::vector<NumericToken> numeric_tokens(std::string_view text);

// Egress check for cloud payloads: surviving PII under the active policy and
// numeric tokens (6+ significant digits) that reproduce a raw sensor or
// feature value.
class PayloadScanner {
 public:
  explicit PayloadScanner(const Redactor& redactor) : redactor_(redactor) {}

  ScanResult scan(std::string_view payload, std::span<const double> raw_values = {}) const;

  static constexpr std::size_t kMinSignificantDigits = 6;

 private:
  const Redactor& redactor_;
};

}  // namespace senseplane::secure
