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

#include "senseplane/retrieval/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "senseplane/error.hpp"

namespace senseplane::retrieval {

std::uint32_t Bm25Index::add(const std::vector<std::string>& terms) {
  const auto doc = static_cast<std::uint32_t>(doc_lengths_.size());
  std::map<std::string, std::uint32_t> counts;
  for (const auto& t : terms) ++counts[t];
  for (const auto& [term, tf] : counts) postings_[term].push_back({doc, tf});
  doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
  total_length_ += terms.size();
  return doc;
}

double Bm25Index::average_length() const {
  if (doc_lengths_.empty()) return 0.0;
  return static_cast<double>(total_length_) / static_cast<double>(doc_lengths_.size());
}

double Bm25Index::idf(const std::string& term) const {
  const auto it = postings_.find(term);
  const double n = it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
  const double total = static_cast<double>(size());
  return std::log(1.0 + (total - n + 0.5) / (n + 0.5));
}

std::vector<double> Bm25Index::score_all(const std::vector<std::string>& query) const {
  std::vector<double> scores(size(), 0.0);
  const double avgdl = average_length();
  if (avgdl <= 0.0) return scores;
  const std::set<std::string> unique(query.begin(), query.end());
  for (const auto& term : unique) {
    const auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double w = idf(term);
    for (const Posting& p : it->second) {
      const double tf = p.tf;
      const double len_norm = 1.0 - params_.b + params_.b * doc_lengths_[p.doc] / avgdl;
      scores[p.doc] += w * tf * (params_.k1 + 1.0) / (tf + params_.k1 * len_norm);
    }
  }
  return scores;
}

Bm25Index Bm25Index::from_postings(Bm25Params params, std::vector<std::uint32_t> doc_lengths,
                                   std::map<std::string, std::vector<Posting>> postings) {
  Bm25Index index(params);
  std::vector<std::uint64_t> seen(doc_lengths.size(), 0);
  for (const auto& [term, list] : postings) {
    for (const Posting& p : list) {
      if (p.doc >= doc_lengths.size() || p.tf == 0) {
        fail(ErrorCode::kFormatError, "posting for term '" + term + "' is invalid");
      }
      seen[p.doc] += p.tf;
    }
  }
  for (std::size_t d = 0; d < doc_lengths.size(); ++d) {
    if (seen[d] != doc_lengths[d]) fail(ErrorCode::kFormatError, "postings disagree with lengths");
    index.total_length_ += doc_lengths[d];
  }
  index.doc_lengths_ = std::move(doc_lengths);
  index.postings_ = std::move(postings);
  return index;
}

std::vector<double> min_max_normalize(const std::vector<double>& scores) {
  std::vector<double> out(scores.size(), 0.0);
  if (scores.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi <= 0.0) return out;
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 1.0);
    return out;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - lo) / (hi - lo);
  return out;
}

}  // namespace senseplane::retrieval
