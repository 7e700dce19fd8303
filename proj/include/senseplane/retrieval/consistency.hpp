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

#include <functional>
#include <span>
#include <string>

#include "senseplane/retrieval/snippet.hpp"

namespace senseplane::retrieval {

// Pairwise agreement between two snippets in [-1, 1]. Must be total.
class ConsistencyOracle {
 public:
  virtual ~ConsistencyOracle() = default;
  virtual double operator()(const Snippet& a, const Snippet& b) const = 0;
};

// Wraps any callable.
class FunctionOracle : public ConsistencyOracle {
 public:
  explicit FunctionOracle(std::function<double(const Snippet&, const Snippet&)> fn)
      : fn_(std::move(fn)) {}
  double operator()(const Snippet& a, const Snippet& b) const override { return fn_(a, b); }

 private:
  std::function<double(const Snippet&, const Snippet&)> fn_;
};

struct LexicalOracleConfig {
  // Minimum overlap |A & B| / min(|A|, |B|) over rare terms for +1.
  double overlap_threshold = 0.5;
  // A term is rare when its document frequency is at most this share of the
  // corpus (and always when no statistics are attached).
  double rare_df_share = 0.2;
};

// Default lexical heuristic.
//  -1: some clause of one snippet has the same content terms as a clause of
//      the other but opposite negation polarity;
//  +1: rare-term overlap at or above the threshold;
//   0: otherwise.
class LexicalOracle : public ConsistencyOracle {
 public:
  using DocFrequency = std::function<std::size_t(const std::string&)>;

  explicit LexicalOracle(LexicalOracleConfig config = {}) : config_(config) {}
  LexicalOracle(LexicalOracleConfig config, DocFrequency df, std::size_t corpus_size)
      : config_(config), df_(std::move(df)), corpus_size_(corpus_size) {}

  double operator()(const Snippet& a, const Snippet& b) const override;

 private:
  bool is_rare(const std::string& term) const;

  LexicalOracleConfig config_;
  DocFrequency df_;
  std::size_t corpus_size_ = 0;
};

// Mean of oracle(candidate, s) over the selected set; 0 when it is empty.
double consistency_score(const Snippet& candidate, std::span<const Snippet> selected,
                         const ConsistencyOracle& oracle);

}  // namespace senseplane::retrieval
