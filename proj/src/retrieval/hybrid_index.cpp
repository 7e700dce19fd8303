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

#include "senseplane/retrieval/hybrid_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"

#include "senseplane/error.hpp"
#include "senseplane/retrieval/corpus_io.hpp"
#include "senseplane/retrieval/tokenizer.hpp"

namespace senseplane::retrieval {
namespace {

using nlohmann::json;

bool by_score_then_id(double sa, const std::string& ia, double sb, const std::string& ib) {
  return sa > sb || (sa == sb && ia < ib);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << data;
  if (!out) fail(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace

std::string_view to_string(DocType type) {
  switch (type) {
    case DocType::kPolicy: return "policy";
    case DocType::kManual: return "manual";
    case DocType::kNote: return "note";
    case DocType::kMap: return "map";
  }
  return "note";
}

DocType doc_type_from_string(std::string_view name) {
  if (name == "policy") return DocType::kPolicy;
  if (name == "manual") return DocType::kManual;
  if (name == "note") return DocType::kNote;
  if (name == "map") return DocType::kMap;
  fail(ErrorCode::kInvalidArgument, "unknown doc_type '" + std::string(name) + "'");
}

void HybridIndexConfig::validate() const {
  if (embedding_dim == 0) fail(ErrorCode::kInvalidArgument, "embedding_dim must be positive");
  if (hnsw_m < 2) fail(ErrorCode::kInvalidArgument, "hnsw_m must be at least 2");
  if (ef_query == 0 || ef_construction == 0) fail(ErrorCode::kInvalidArgument, "ef must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::kInvalidArgument, "lambda outside [0,1]");
  if (!(kappa >= 0.0 && kappa <= 1.0)) fail(ErrorCode::kInvalidArgument, "kappa outside [0,1]");
  if (!(bm25_k1 >= 0.0) || !(bm25_b >= 0.0 && bm25_b <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "bm25 parameters out of range");
  }
  if (k_max == 0 || k_max > 5) fail(ErrorCode::kInvalidArgument, "k_max must be in 1..5");
}

RetrievalQuery make_query(std::vector<float> dense_vector, std::string_view text) {
  RetrievalQuery q;
  q.dense_vector = std::move(dense_vector);
  q.keywords = tokenize(text);
  return q;
}

HybridIndex::HybridIndex(HybridIndexConfig config)
    : config_(config),
      graph_(std::max<std::size_t>(config.embedding_dim, 1),
             HnswParams{config.hnsw_m, config.ef_construction, config.ef_query,
                        derive_seed(config.seed, "hnsw-levels")}),
      bm25_(Bm25Params{config.bm25_k1, config.bm25_b}) {
  config_.validate();
}

void HybridIndex::add(Snippet snippet) {
  if (snippet.text.size() > kMaxSnippetChars) {
    fail(ErrorCode::kOversizeText, "snippet '" + snippet.doc_id + "' has " +
                                       std::to_string(snippet.text.size()) + " characters");
  }
  if (snippet.embedding.size() != config_.embedding_dim) {
    fail(ErrorCode::kDimensionMismatch, "embedding has " +
                                            std::to_string(snippet.embedding.size()) +
                                            " dims, index expects " +
                                            std::to_string(config_.embedding_dim));
  }
  double norm = 0.0;
  for (const float v : snippet.embedding) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteInput, "embedding is not finite");
    norm += static_cast<double>(v) * v;
  }
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-6) {
    fail(ErrorCode::kInvalidArgument, "embedding is not unit norm");
  }
  const auto terms = tokenize(snippet.text);
  std::unique_lock lock(mutex_);
  if (by_id_.count(snippet.doc_id) != 0) {
    fail(ErrorCode::kDuplicateDocId, "doc_id '" + snippet.doc_id + "' already indexed");
  }
  const std::uint32_t ordinal = graph_.add(snippet.embedding);
  bm25_.add(terms);
  by_id_.emplace(snippet.doc_id, ordinal);
  docs_.push_back(std::move(snippet));
}

std::size_t HybridIndex::size() const {
  std::shared_lock lock(mutex_);
  return docs_.size();
}

std::optional<Snippet> HybridIndex::get(const std::string& doc_id) const {
  std::shared_lock lock(mutex_);
  const auto it = by_id_.find(doc_id);
  if (it == by_id_.end()) return std::nullopt;
  return docs_[it->second];
}

std::size_t HybridIndex::document_frequency(const std::string& term) const {
  std::shared_lock lock(mutex_);
  const auto it = bm25_.postings().find(term);
  return it == bm25_.postings().end() ? 0 : it->second.size();
}

LexicalOracle HybridIndex::lexical_oracle(LexicalOracleConfig config) const {
  return LexicalOracle(
      config, [this](const std::string& term) { return document_frequency(term); }, size());
}

double HybridIndex::cosine(const std::vector<float>& q, std::uint32_t doc) const {
  const auto& e = docs_[doc].embedding;
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) s += static_cast<double>(q[i]) * e[i];
  return s;
}

std::vector<DenseHit> HybridIndex::dense_search_locked(const RetrievalQuery& query,
                                                       std::size_t n) const {
  if (docs_.empty()) fail(ErrorCode::kEmptyIndex, "dense search on an empty index");
  if (n == 0) fail(ErrorCode::kInvalidK, "n must be at least 1");
  if (query.dense_vector.size() != config_.embedding_dim) {
    fail(ErrorCode::kDimensionMismatch, "query vector dimension mismatch");
  }
  std::vector<DenseHit> hits;
  if (docs_.size() <= config_.exact_scan_limit) {
    hits.reserve(docs_.size());
    for (std::uint32_t d = 0; d < docs_.size(); ++d) {
      hits.push_back({docs_[d].doc_id, cosine(query.dense_vector, d)});
    }
  } else {
    const auto found =
        graph_.search(query.dense_vector, n, std::max(config_.ef_query, n));
    hits.reserve(found.size());
    for (const auto& nb : found) hits.push_back({docs_[nb.id].doc_id, cosine(query.dense_vector, nb.id)});
  }
  std::sort(hits.begin(), hits.end(), [](const DenseHit& a, const DenseHit& b) {
    return by_score_then_id(a.score, a.doc_id, b.score, b.doc_id);
  });
  if (hits.size() > n) hits.resize(n);
  return hits;
}

std::vector<DenseHit> HybridIndex::dense_search(const RetrievalQuery& query, std::size_t n) const {
  std::shared_lock lock(mutex_);
  return dense_search_locked(query, n);
}

std::vector<double> HybridIndex::sparse_norms_locked(const RetrievalQuery& query,
                                                     std::vector<double>* raw) const {
  if (docs_.empty()) fail(ErrorCode::kEmptyIndex, "sparse search on an empty index");
  std::vector<double> scores = bm25_.score_all(query.keywords);
  std::vector<double> norms = min_max_normalize(scores);
  if (raw != nullptr) *raw = std::move(scores);
  return norms;
}

std::vector<SparseHit> HybridIndex::sparse_search(const RetrievalQuery& query,
                                                  std::size_t n) const {
  std::shared_lock lock(mutex_);
  std::vector<double> raw;
  const std::vector<double> norms = sparse_norms_locked(query, &raw);
  std::vector<SparseHit> hits;
  for (std::uint32_t d = 0; d < docs_.size(); ++d) {
    if (raw[d] > 0.0) hits.push_back({docs_[d].doc_id, raw[d], norms[d]});
  }
  std::sort(hits.begin(), hits.end(), [](const SparseHit& a, const SparseHit& b) {
    return by_score_then_id(a.score, a.doc_id, b.score, b.doc_id);
  });
  if (hits.size() > n) hits.resize(n);
  return hits;
}

std::vector<ScoredSnippet> HybridIndex::retrieve(const RetrievalQuery& query, std::size_t k,
                                                 const HybridIndexConfig& config,
                                                 const ConsistencyOracle& oracle) const {
  config.validate();
  if (k == 0 || k > config.k_max) {
    fail(ErrorCode::kInvalidK, "k=" + std::to_string(k) + " outside 1.." +
                                   std::to_string(config.k_max));
  }
  std::shared_lock lock(mutex_);
  if (docs_.empty()) fail(ErrorCode::kEmptyIndex, "retrieve on an empty index");
  std::vector<double> raw;
  const std::vector<double> norms = sparse_norms_locked(query, &raw);

  std::vector<std::uint32_t> pool;
  if (docs_.size() <= config.full_pool_limit) {
    pool.resize(docs_.size());
    for (std::uint32_t d = 0; d < docs_.size(); ++d) pool[d] = d;
  } else {
    for (const auto& hit : dense_search_locked(query, 2 * k)) pool.push_back(by_id_.at(hit.doc_id));
    std::vector<std::uint32_t> sparse_order;
    for (std::uint32_t d = 0; d < docs_.size(); ++d) {
      if (raw[d] > 0.0) sparse_order.push_back(d);
    }
    std::sort(sparse_order.begin(), sparse_order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return by_score_then_id(raw[a], docs_[a].doc_id, raw[b], docs_[b].doc_id);
    });
    if (sparse_order.size() > 2 * k) sparse_order.resize(2 * k);
    pool.insert(pool.end(), sparse_order.begin(), sparse_order.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  }

  std::vector<ScoredSnippet> candidates;
  candidates.reserve(pool.size());
  for (const std::uint32_t d : pool) {
    ScoredSnippet s;
    s.snippet = docs_[d];
    s.dense_score = cosine(query.dense_vector, d);
    s.sparse_score = raw[d];
    s.sparse_norm = norms[d];
    candidates.push_back(std::move(s));
  }

  std::vector<ScoredSnippet> selected;
  std::vector<Snippet> chosen;
  std::vector<bool> used(candidates.size(), false);
  const std::size_t turns = std::min(k, candidates.size());
  for (std::size_t turn = 0; turn < turns; ++turn) {
    std::size_t best = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      ScoredSnippet& c = candidates[i];
      c.consistency = consistency_score(c.snippet, chosen, oracle);
      c.total = c.recompute_total(config.lambda, config.kappa);
      if (best == candidates.size() ||
          by_score_then_id(c.total, c.snippet.doc_id, candidates[best].total,
                           candidates[best].snippet.doc_id)) {
        best = i;
      }
    }
    used[best] = true;
    chosen.push_back(candidates[best].snippet);
    selected.push_back(candidates[best]);
  }
  return selected;
}

void HybridIndex::save(const std::filesystem::path& dir) const {
  std::shared_lock lock(mutex_);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + dir.string());
  write_file(dir / "graph.bin", graph_.serialize());

  json postings = json::object();
  for (const auto& [term, list] : bm25_.postings()) {
    json arr = json::array();
    for (const Posting& p : list) arr.push_back({p.doc, p.tf});
    postings[term] = std::move(arr);
  }
  json post_doc = {{"doc_lengths", bm25_.doc_lengths()}, {"postings", std::move(postings)}};
  write_file(dir / "postings.json", post_doc.dump());

  json docs = json::array();
  for (const Snippet& s : docs_) docs.push_back(json::parse(snippet_to_json_line(s)));
  json manifest = {
      {"format", "senseplane-index"},
      {"version", 1},
      {"config",
       {{"hnsw_m", config_.hnsw_m},
        {"ef_construction", config_.ef_construction},
        {"ef_query", config_.ef_query},
        {"embedding_dim", config_.embedding_dim},
        {"bm25_k1", config_.bm25_k1},
        {"bm25_b", config_.bm25_b},
        {"lambda", config_.lambda},
        {"kappa", config_.kappa},
        {"k_max", config_.k_max},
        {"exact_scan_limit", config_.exact_scan_limit},
        {"full_pool_limit", config_.full_pool_limit},
        {"seed", config_.seed}}},
      {"documents", std::move(docs)}};
  write_file(dir / "manifest.json", manifest.dump(1));
}

std::unique_ptr<HybridIndex> HybridIndex::load(const std::filesystem::path& dir) {
  json manifest;
  json post_doc;
  try {
    manifest = json::parse(read_file(dir / "manifest.json"));
    post_doc = json::parse(read_file(dir / "postings.json"));
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("index files unreadable: ") + e.what());
  }
  HybridIndexConfig cfg;
  std::vector<Snippet> docs;
  std::vector<std::uint32_t> lengths;
  std::map<std::string, std::vector<Posting>> postings;
  try {
    if (manifest.at("version").get<int>() != 1) fail(ErrorCode::kFormatError, "unsupported index version");
    const json& c = manifest.at("config");
    cfg.hnsw_m = c.at("hnsw_m");
    cfg.ef_construction = c.at("ef_construction");
    cfg.ef_query = c.at("ef_query");
    cfg.embedding_dim = c.at("embedding_dim");
    cfg.bm25_k1 = c.at("bm25_k1");
    cfg.bm25_b = c.at("bm25_b");
    cfg.lambda = c.at("lambda");
    cfg.kappa = c.at("kappa");
    cfg.k_max = c.at("k_max");
    cfg.exact_scan_limit = c.at("exact_scan_limit");
    cfg.full_pool_limit = c.at("full_pool_limit");
    cfg.seed = c.at("seed");
    for (const json& d : manifest.at("documents")) docs.push_back(snippet_from_json_line(d.dump()));
    lengths = post_doc.at("doc_lengths").get<std::vector<std::uint32_t>>();
    for (const auto& [term, arr] : post_doc.at("postings").items()) {
      auto& list = postings[term];
      for (const json& p : arr) list.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("index manifest malformed: ") + e.what());
  }
  auto index_ptr = std::make_unique<HybridIndex>(cfg);
  HybridIndex& index = *index_ptr;
  index.graph_ = HnswGraph::deserialize(read_file(dir / "graph.bin"));
  if (index.graph_.size() != docs.size() || lengths.size() != docs.size()) {
    fail(ErrorCode::kFormatError, "index files disagree on document count");
  }
  index.bm25_ = Bm25Index::from_postings(Bm25Params{cfg.bm25_k1, cfg.bm25_b}, std::move(lengths),
                                         std::move(postings));
  for (std::uint32_t d = 0; d < docs.size(); ++d) {
    if (!index.by_id_.emplace(docs[d].doc_id, d).second) {
      fail(ErrorCode::kDuplicateDocId, "duplicate doc_id in manifest");
    }
  }
  index.docs_ = std::move(docs);
  return index_ptr;
}

}  // namespace senseplane::retrieval
