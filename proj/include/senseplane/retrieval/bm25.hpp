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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace senseplane::retrieval {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::uint32_t doc = 0;
  std::uint32_t tf = 0;
};

// Inverted index with Okapi BM25 scoring. The idf term is the non-negative
// variant ln(1 + (N - n + 0.5) / (n + 0.5)).
class Bm25Index {
 public:
  explicit Bm25Index(Bm25Params params = {}) : params_(params) {}

  // Appends a document given its already-tokenized terms; returns its ordinal.
  std::uint32_t add(const std::vector<std::string>& terms);

  // Scores every document; documents without any query term score 0.
  // Repeated query terms count once.
  std::vector<double> score_all(const std::vector<std::string>& query) const;

  double idf(const std::string& term) const;
  std::size_t size() const { return doc_lengths_.size(); }
  double average_length() const;
  const Bm25Params& params() const { return params_; }
  const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }
  const std::vector<std::uint32_t>& doc_lengths() const { return doc_lengths_; }

  // Rebuilds from persisted postings; validates ordinals and lengths.
  static Bm25Index from_postings(Bm25Params params, std::vector<std::uint32_t> doc_lengths,
                                 std::map<std::string, std::vector<Posting>> postings);

 private:
  Bm25Params params_;
  std::map<std::string, std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_lengths_;
  std::uint64_t total_length_ = 0;
};

// Min-max normalization of a full score vector into [0, 1]. A constant
// positive vector maps to 1, an all-zero vector to 0.
std::vector<double> min_max_normalize(const std::vector<double>& scores);

}  // namespace senseplane::retrieval
