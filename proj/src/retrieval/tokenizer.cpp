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

#include "senseplane/retrieval/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace senseplane::retrieval {
namespace {

// Sorted for binary search.
constexpr std::array<std::string_view, 52> kStopwords = {
    "a",    "about", "after", "all",   "an",    "and",   "any",  "are",  "as",    "at",
    "be",   "been",  "but",   "by",    "can",   "could", "did",  "do",   "does",  "for",
    "from", "had",   "has",   "have",  "he",    "her",   "his",  "if",   "in",    "into",
    "is",   "it",    "its",   "may",   "of",    "on",    "or",   "our",  "she",   "should",
    "so",   "that",  "the",   "their", "then",  "there", "they", "this", "to",    "was",
    "were", "with"};

constexpr std::array<std::string_view, 8> kNegations = {
    "cannot", "dont", "mustnt", "never", "no", "not", "shouldnt", "without"};

}  // namespace

bool is_stopword(std::string_view token) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), token);
}

bool is_negation(std::string_view token) {
  return std::binary_search(kNegations.begin(), kNegations.end(), token);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    const bool numeric =
        std::all_of(current.begin(), current.end(), [](char c) { return std::isdigit(c); });
    if (!numeric && !is_stopword(current)) tokens.push_back(current);
    current.clear();
  };
  for (const char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (c == '\'') {
      // "don't" -> "dont"
      continue;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace senseplane::retrieval
