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

#include <string>
#include <string_view>
#include <vector>

namespace senseplane::retrieval {

enum class DocType { kPolicy, kManual, kNote, kMap };

std::string_view to_string(DocType type);
DocType doc_type_from_string(std::string_view name);

inline constexpr std::size_t kMaxSnippetChars = 512;

struct Snippet {
  std::string doc_id;
  std::string text;
  std::vector<float> embedding;  // unit norm
  DocType doc_type = DocType::kNote;
  std::vector<std::string> entity_tags;
  // Set when the text was replaced by an abstract summary after a leak flag.
  bool abstracted = false;
};

// One retrieved piece of evidence with its score decomposition:
// total = lambda * dense_score + (1 - lambda) * sparse_norm + kappa * consistency.
struct ScoredSnippet {
  Snippet snippet;
  double dense_score = 0.0;
  double sparse_score = 0.0;
  double sparse_norm = 0.0;
  double consistency = 0.0;
  double total = 0.0;

  double recompute_total(double lambda, double kappa) const {
    return lambda * dense_score + (1.0 - lambda) * sparse_norm + kappa * consistency;
  }
};

}  // namespace senseplane::retrieval
