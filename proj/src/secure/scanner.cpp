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

#include "senseplane/secure/scanner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace senseplane::secure {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<NumericToken> numeric_tokens(std::string_view text) {
  std::vector<NumericToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i]) && !(text[i] == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      ++i;
      continue;
    }
    const std::size_t begin = (i > 0 && text[i - 1] == '-') ? i - 1 : i;
    std::size_t j = i;
    std::size_t sig = 0;
    int frac_digits = 0;
    bool seen_dot = false;
    bool leading = true;
    for (; j < text.size(); ++j) {
      const char c = text[j];
      if (c == '.' && !seen_dot) {
        seen_dot = true;
      } else if (is_digit(c)) {
        if (c != '0') leading = false;
        if (!leading) ++sig;
        if (seen_dot) ++frac_digits;
      } else {
        break;
      }
    }
    int exponent = 0;
    std::size_t end = j;
    if (j + 1 < text.size() && (text[j] == 'e' || text[j] == 'E')) {
      std::size_t k = j + 1;
      if (text[k] == '+' || text[k] == '-') ++k;
      if (k < text.size() && is_digit(text[k])) {
        while (k < text.size() && is_digit(text[k])) ++k;
        exponent = std::atoi(std::string(text.substr(j + 1, k - j - 1)).c_str());
        end = k;
      }
    }
    const std::string token(text.substr(begin, end - begin));
    NumericToken t;
    t.value = std::strtod(token.c_str(), nullptr);
    t.unit = std::pow(10.0, exponent - frac_digits);
    t.significant_digits = sig;
    out.push_back(t);
    i = end;
  }
  return out;
}

ScanResult PayloadScanner::scan(std::string_view payload, std::span<const double> raw_values) const {
  ScanResult result;
  result.pii_matches = redactor_.count_matches(payload);
  if (raw_values.empty()) return result;
  std::vector<double> sorted;
  sorted.reserve(raw_values.size());
  for (const double v : raw_values) {
    // Values this small render as runs of zeros that occur anywhere.
    if (std::isfinite(v) && std::abs(v) >= 1e-3) sorted.push_back(v);
  }
  std::sort(sorted.begin(), sorted.end());
  for (const auto& t : numeric_tokens(payload)) {
    if (t.significant_digits < kMinSignificantDigits) continue;
    // Unsigned tokens may be the magnitude of a negative value.
    for (const double x : {t.value, -t.value}) {
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), x - t.unit);
      if (it != sorted.end() && *it <= x + t.unit) {
        ++result.raw_value_matches;
        break;
      }
    }
  }
  return result;
}

}  // namespace senseplane::secure
