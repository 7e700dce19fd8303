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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "senseplane/error.hpp"
#include "senseplane/random.hpp"
#include "senseplane/retrieval/bm25.hpp"
#include "senseplane/retrieval/consistency.hpp"
#include "senseplane/retrieval/corpus_io.hpp"
#include "senseplane/retrieval/hnsw.hpp"
#include "senseplane/retrieval/hybrid_index.hpp"
#include "senseplane/retrieval/retrieval_cache.hpp"
#include "senseplane/retrieval/tokenizer.hpp"

namespace senseplane::retrieval {
namespace {

std::vector<float> unit_vector(std::size_t dim, Rng& rng) {
  std::vector<float> v(dim);
  double norm = 0.0;
  for (float& x : v) {
    x = static_cast<float>(rng.normal());
    norm += static_cast<double>(x) * x;
  }
  for (float& x : v) x = static_cast<float>(x / std::sqrt(norm));
  return v;
}

std::vector<float> axis(std::size_t dim, std::size_t i) {
  std::vector<float> v(dim, 0.0f);
  v[i] = 1.0f;
  return v;
}

Snippet make_snippet(std::string id, std::string text, std::vector<float> emb) {
  Snippet s;
  s.doc_id = std::move(id);
  s.text = std::move(text);
  s.embedding = std::move(emb);
  return s;
}

HybridIndexConfig small_config(std::size_t dim) {
  HybridIndexConfig c;
  c.embedding_dim = dim;
  return c;
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(Tokenizer, LowercasesAndDropsStopwords) {
  EXPECT_EQ(tokenize("The Stove is ON, don't touch 42"),
            (std::vector<std::string>{"stove", "dont", "touch"}));
  EXPECT_TRUE(is_negation("not"));
  EXPECT_FALSE(is_negation("note"));
}

TEST(Bm25, HandComputedThreeDocCorpus) {
  HybridIndex index(small_config(4));
  index.add(make_snippet("d0", "apple apple banana", axis(4, 0)));
  index.add(make_snippet("d1", "banana cherry", axis(4, 1)));
  index.add(make_snippet("d2", "apple cherry cherry cherry", axis(4, 2)));
  // N = 3, avgdl = 3; both query terms occur in two documents.
  const double idf = std::log(1.0 + (3.0 - 2.0 + 0.5) / (2.0 + 0.5));
  const double d0 = idf * (2.0 * 2.2 / (2.0 + 1.2 * (0.25 + 0.75 * 3.0 / 3.0)));
  const double d1 = idf * (1.0 * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 2.0 / 3.0)));
  const double d2 = idf * (1.0 * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 4.0 / 3.0)) +
                           3.0 * 2.2 / (3.0 + 1.2 * (0.25 + 0.75 * 4.0 / 3.0)));
  RetrievalQuery q = make_query(axis(4, 3), "apple cherry");
  const auto hits = index.sparse_search(q, 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].doc_id, "d2");
  EXPECT_EQ(hits[1].doc_id, "d0");
  EXPECT_EQ(hits[2].doc_id, "d1");
  EXPECT_NEAR(hits[0].score, d2, 1e-9);
  EXPECT_NEAR(hits[1].score, d0, 1e-9);
  EXPECT_NEAR(hits[2].score, d1, 1e-9);
  EXPECT_NEAR(hits[0].norm, 1.0, 1e-12);
  EXPECT_NEAR(hits[1].norm, (d0 - d1) / (d2 - d1), 1e-9);
  EXPECT_NEAR(hits[2].norm, 0.0, 1e-12);
}

TEST(Bm25, AbsentTermAndSingletonCorpus) {
  HybridIndex index(small_config(4));
  index.add(make_snippet("only", "kettle left on", axis(4, 0)));
  EXPECT_TRUE(index.sparse_search(make_query(axis(4, 1), "window"), 5).empty());
  const auto hits = index.sparse_search(make_query(axis(4, 1), "kettle"), 5);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].norm, 1.0);
}

TEST(HybridIndex, AddAndSelfSearch) {
  Rng rng(1);
  HybridIndex index(small_config(16));
  std::vector<std::vector<float>> embs;
  for (int i = 0; i < 100; ++i) {
    embs.push_back(unit_vector(16, rng));
    index.add(make_snippet("doc-" + std::to_string(i), "note " + std::to_string(i), embs.back()));
  }
  EXPECT_EQ(index.size(), 100u);
  const auto hits = index.dense_search(make_query(embs[42], ""), 3);
  EXPECT_EQ(hits[0].doc_id, "doc-42");
  EXPECT_NEAR(hits[0].score, 1.0, 1e-6);
}

TEST(HybridIndex, OrthogonalQueryScoresZero) {
  HybridIndex index(small_config(4));
  index.add(make_snippet("a", "x", axis(4, 0)));
  index.add(make_snippet("b", "y", axis(4, 1)));
  for (const auto& h : index.dense_search(make_query(axis(4, 3), ""), 2)) EXPECT_NEAR(h.score, 0.0, 1e-6);
}

TEST(HybridIndex, Errors) {
  HybridIndex index(small_config(4));
  EXPECT_EQ(code_of([&] { index.dense_search(make_query(axis(4, 0), ""), 1); }), ErrorCode::kEmptyIndex);
  index.add(make_snippet("a", "x", axis(4, 0)));
  EXPECT_EQ(code_of([&] { index.add(make_snippet("a", "y", axis(4, 1))); }), ErrorCode::kDuplicateDocId);
  EXPECT_EQ(code_of([&] { index.add(make_snippet("b", std::string(600, 'x'), axis(4, 1))); }),
            ErrorCode::kOversizeText);
  const LexicalOracle oracle;
  EXPECT_EQ(code_of([&] { index.retrieve(make_query(axis(4, 0), ""), 0, oracle); }), ErrorCode::kInvalidK);
  EXPECT_EQ(code_of([&] { index.retrieve(make_query(axis(4, 0), ""), 6, oracle); }), ErrorCode::kInvalidK);
}

TEST(Hnsw, RecallAgainstExhaustiveScan) {
  Rng rng(7);
  const std::size_t dim = 32;
  HnswGraph graph(dim, HnswParams{});
  std::vector<std::vector<float>> docs;
  for (int i = 0; i < 1000; ++i) {
    docs.push_back(unit_vector(dim, rng));
    graph.add(docs.back());
  }
  double recall = 0.0;
  for (int q = 0; q < 50; ++q) {
    const auto query = unit_vector(dim, rng);
    std::vector<std::pair<double, std::uint32_t>> exact;
    for (std::uint32_t i = 0; i < docs.size(); ++i) {
      double dotp = 0.0;
      for (std::size_t j = 0; j < dim; ++j) dotp += static_cast<double>(query[j]) * docs[i][j];
      exact.emplace_back(-dotp, i);
    }
    std::sort(exact.begin(), exact.end());
    std::set<std::uint32_t> truth;
    for (int i = 0; i < 10; ++i) truth.insert(exact[i].second);
    std::size_t found = 0;
    for (const auto& nb : graph.search(query, 10, 64)) found += truth.count(nb.id);
    recall += static_cast<double>(found) / 10.0;
  }
  EXPECT_GE(recall / 50.0, 0.95);
}

TEST(Hnsw, SerializeRoundTrip) {
  Rng rng(8);
  HnswGraph graph(8, HnswParams{});
  for (int i = 0; i < 300; ++i) graph.add(unit_vector(8, rng));
  const HnswGraph back = HnswGraph::deserialize(graph.serialize());
  const auto q = unit_vector(8, rng);
  const auto a = graph.search(q, 5, 32);
  const auto b = back.search(q, 5, 32);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].id, b[i].id);
}

TEST(Consistency, BaseCasesAndMean) {
  const Snippet a = make_snippet("a", "the stove is on", {});
  EXPECT_EQ(consistency_score(a, {}, LexicalOracle{}), 0.0);
  const FunctionOracle ones([](const Snippet&, const Snippet&) { return 1.0; });
  const std::vector<Snippet> sel = {a, a, a};
  EXPECT_EQ(consistency_score(a, sel, ones), 1.0);
}

TEST(Consistency, LexicalContradictionIsNegative) {
  const Snippet yes = make_snippet("p1", "Residents may use the stove unattended.", {});
  const Snippet no = make_snippet("p2", "Residents may not use the stove unattended.", {});
  const std::vector<Snippet> sel = {yes};
  EXPECT_LT(consistency_score(no, sel, LexicalOracle{}), 0.0);
  const Snippet agree = make_snippet("m1", "Stove supervision for residents.", {});
  EXPECT_GE(LexicalOracle{}(yes, agree), 0.0);
}

TEST(Retrieve, ScoresRecomputableAndOrderedByTurn) {
  Rng rng(3);
  HybridIndex index(small_config(12));
  const std::vector<std::string> words = {"stove", "door", "fall", "sleep", "medication", "kettle"};
  for (int i = 0; i < 40; ++i) {
    std::string text;
    for (int w = 0; w < 4; ++w) text += words[rng.index(words.size())] + " ";
    index.add(make_snippet("doc-" + std::to_string(100 + i), text, unit_vector(12, rng)));
  }
  const auto oracle = index.lexical_oracle();
  const RetrievalQuery q = make_query(unit_vector(12, rng), "stove kettle");
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto out = index.retrieve(q, k, oracle);
    ASSERT_EQ(out.size(), k);
    for (const auto& s : out) {
      EXPECT_LT(std::abs(s.total - s.recompute_total(0.6, 0.2)), 1e-12);
    }
    // The first pick does not depend on k.
    EXPECT_EQ(out.front().snippet.doc_id, index.retrieve(q, 1, oracle).front().snippet.doc_id);
  }
}

TEST(Retrieve, RaisingLambdaNeverDemotesDenseBest) {
  Rng rng(5);
  HybridIndex index(small_config(8));
  for (int i = 0; i < 30; ++i) {
    index.add(make_snippet("doc-" + std::to_string(i), i % 3 == 0 ? "fall hallway" : "kitchen",
                           unit_vector(8, rng)));
  }
  const RetrievalQuery q = make_query(unit_vector(8, rng), "fall");
  const std::string dense_best = index.dense_search(q, 1).front().doc_id;
  const FunctionOracle zero([](const Snippet&, const Snippet&) { return 0.0; });
  std::size_t prev_rank = 99;
  for (int step = 0; step <= 10; ++step) {
    HybridIndexConfig cfg = index.config();
    cfg.lambda = step / 10.0;
    cfg.kappa = 0.0;
    const auto out = index.retrieve(q, 5, cfg, zero);
    std::size_t rank = 99;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].snippet.doc_id == dense_best) rank = i;
    }
    EXPECT_LE(rank, prev_rank);
    prev_rank = rank;
  }
  EXPECT_EQ(prev_rank, 0u);
}

TEST(RetrievalCache, LruSemantics) {
  RetrievalCache cache(2);
  cache.put("a", {"d1", "d2"});
  EXPECT_EQ(cache.get("a"), (std::vector<std::string>{"d1", "d2"}));
  cache.put("b", {"d3"});
  cache.put("c", {"d4"});
  EXPECT_FALSE(cache.get("a").has_value());
  EXPECT_TRUE(cache.get("c").has_value());
  EXPECT_EQ(cache.hits(), 2u);
  EXPECT_EQ(cache.misses(), 1u);
}

TEST(CorpusIo, EmbeddingAndLineRoundTrip) {
  Rng rng(2);
  Snippet s = make_snippet("doc-7", "Policy: \"quoted\" text", unit_vector(6, rng));
  s.doc_type = DocType::kPolicy;
  s.entity_tags = {"stove", "kitchen"};
  EXPECT_EQ(decode_embedding(encode_embedding(s.embedding)), s.embedding);
  const Snippet back = snippet_from_json_line(snippet_to_json_line(s));
  EXPECT_EQ(back.doc_id, s.doc_id);
  EXPECT_EQ(back.text, s.text);
  EXPECT_EQ(back.embedding, s.embedding);
  EXPECT_EQ(back.doc_type, s.doc_type);
  EXPECT_EQ(back.entity_tags, s.entity_tags);
  EXPECT_EQ(code_of([] { snippet_from_json_line("{not json"); }), ErrorCode::kFormatError);
}

TEST(HybridIndex, SaveLoadPreservesResults) {
  Rng rng(4);
  HybridIndex index(small_config(8));
  for (int i = 0; i < 300; ++i) {
    index.add(make_snippet("doc-" + std::to_string(i), i % 2 ? "door alarm" : "stove kettle",
                           unit_vector(8, rng)));
  }
  const auto dir = std::filesystem::temp_directory_path() / "senseplane_index_test";
  std::filesystem::remove_all(dir);
  index.save(dir);
  const auto loaded = HybridIndex::load(dir);
  const RetrievalQuery q = make_query(unit_vector(8, rng), "door");
  const auto a = index.retrieve(q, 4, index.lexical_oracle());
  const auto b = loaded->retrieve(q, 4, loaded->lexical_oracle());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].snippet.doc_id, b[i].snippet.doc_id);
    EXPECT_EQ(a[i].total, b[i].total);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace senseplane::retrieval
