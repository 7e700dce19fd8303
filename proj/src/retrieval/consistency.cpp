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

#include "senseplane/retrieval/consistency.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "senseplane/retrieval/tokenizer.hpp"

namespace senseplane::retrieval {
namespace {

struct Clause {
  std::set<std::string> core;
  bool negated = false;
};

bool is_clause_break(char c) { return c == '.' || c == ';' || c == ',' || c == '!' || c == '?'; }

std::vector<Clause> clauses(const std::string& text) {
  std::vector<Clause> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && !is_clause_break(text[i])) continue;
    Clause clause;
    for (auto& token : tokenize(std::string_view(text).substr(start, i - start))) {
      if (is_negation(token)) {
        clause.negated = !clause.negated;
      } else {
        clause.core.insert(std::move(token));
      }
    }
    if (!clause.core.empty()) out.push_back(std::move(clause));
    start = i + 1;
  }
  return out;
}

}  // namespace

bool LexicalOracle::is_rare(const std::string& term) const {
  if (!df_ || corpus_size_ == 0) return true;
  const double share = static_cast<double>(df_(term)) / static_cast<double>(corpus_size_);
  return share <= config_.rare_df_share;
}

double LexicalOracle::operator()(const Snippet& a, const Snippet& b) const {
  const auto ca = clauses(a.text);
  const auto cb = clauses(b.text);
  for (const Clause& x : ca) {
    for (const Clause& y : cb) {
      if (x.negated != y.negated && x.core == y.core) return -1.0;
    }
  }
  std::set<std::string> ra;
  std::set<std::string> rb;
  for (const Clause& x : ca) {
    for (const auto& t : x.core) {
      if (is_rare(t)) ra.insert(t);
    }
  }
  for (const Clause& y : cb) {
    for (const auto& t : y.core) {
      if (is_rare(t)) rb.insert(t);
    }
  }
  if (ra.empty() || rb.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& t : ra) shared += rb.count(t);
  const double overlap =
      static_cast<double>(shared) / static_cast<double>(std::min(ra.size(), rb.size()));
  return overlap >= config_.overlap_threshold ? 1.0 : 0.0;
}

double consistency_score(const Snippet& candidate, std::span<const Snippet> selected,
                         const ConsistencyOracle& oracle) {
  if (selected.empty()) return 0.0;
  double sum = 0.0;
  for (const Snippet& s : selected) sum += oracle(candidate, s);
  return sum / static_cast<double>(selected.size());
}

}  // namespace senseplane::retrieval
