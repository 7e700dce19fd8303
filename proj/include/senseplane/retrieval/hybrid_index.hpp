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

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "senseplane/retrieval/bm25.hpp"
#include "senseplane/retrieval/consistency.hpp"
#include "senseplane/retrieval/hnsw.hpp"
#include "senseplane/retrieval/snippet.hpp"

namespace senseplane::retrieval {

struct HybridIndexConfig {
  std::size_t hnsw_m = 32;
  std::size_t ef_construction = 200;
  std::size_t ef_query = 64;
  std::size_t embedding_dim = 384;
  double bm25_k1 = 1.2;
  double bm25_b = 0.75;
  double lambda = 0.6;
  double kappa = 0.2;
  std::size_t k_max = 5;
  // Corpora up to this size are searched by exact scan instead of the graph.
  std::size_t exact_scan_limit = 256;
  // Corpora up to this size use every document as the re-ranking pool.
  std::size_t full_pool_limit = 64;
  std::uint64_t seed = 42;

  void validate() const;
};

struct RetrievalQuery {
  std::vector<float> dense_vector;  // unit norm
  std::vector<std::string> keywords;
  std::string site;
  std::string room;
};

// Builds keywords from free text with the index tokenizer.
RetrievalQuery make_query(std::vector<float> dense_vector, std::string_view text);

struct DenseHit {
  std::string doc_id;
  double score = 0.0;
};

struct SparseHit {
  std::string doc_id;
  double score = 0.0;
  double norm = 0.0;
};

// Dense HNSW index plus BM25 inverted index over the same snippets.
// Readers share a lock; add() takes it exclusively.
class HybridIndex {
 public:
  explicit HybridIndex(HybridIndexConfig config = {});

  void add(Snippet snippet);
  std::size_t size() const;
  const HybridIndexConfig& config() const { return config_; }
  std::optional<Snippet> get(const std::string& doc_id) const;
  std::size_t document_frequency(const std::string& term) const;

  std::vector<DenseHit> dense_search(const RetrievalQuery& query, std::size_t n) const;
  // Only documents containing at least one keyword are returned.
  std::vector<SparseHit> sparse_search(const RetrievalQuery& query, std::size_t n) const;

  // Greedy hybrid selection with the weights in `config`.
  std::vector<ScoredSnippet> retrieve(const RetrievalQuery& query, std::size_t k,
                                      const HybridIndexConfig& config,
                                      const ConsistencyOracle& oracle) const;
  std::vector<ScoredSnippet> retrieve(const RetrievalQuery& query, std::size_t k,
                                      const ConsistencyOracle& oracle) const {
    return retrieve(query, k, config_, oracle);
  }

  // Lexical oracle with rare-term statistics from this corpus.
  LexicalOracle lexical_oracle(LexicalOracleConfig config = {}) const;

  // Directory layout: graph.bin, postings.json, manifest.json.
  void save(const std::filesystem::path& dir) const;
  static std::unique_ptr<HybridIndex> load(const std::filesystem::path& dir);

 private:
  double cosine(const std::vector<float>& q, std::uint32_t doc) const;
  std::vector<DenseHit> dense_search_locked(const RetrievalQuery& query, std::size_t n) const;
  std::vector<double> sparse_norms_locked(const RetrievalQuery& query,
                                          std::vector<double>* raw) const;

  HybridIndexConfig config_;
  mutable std::shared_mutex mutex_;
  std::vector<Snippet> docs_;
  std::unordered_map<std::string, std::uint32_t> by_id_;
  HnswGraph graph_;
  Bm25Index bm25_;
};

}  // namespace senseplane::retrieval
