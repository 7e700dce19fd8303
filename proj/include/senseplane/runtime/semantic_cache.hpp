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
#include <filesystem>
#include <list>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "senseplane/decision/types.hpp"
#include "senseplane/digest.hpp"

namespace senseplane::runtime {

struct SemanticCacheEntry {
  Digest128 key;
  std::string text;
  decision::Action action = decision::Action::kEdgeOnly;
  std::string prompt_checksum;
  std::int64_t created_ms = 0;
  std::uint64_t hits = 0;
};

struct SemanticCacheConfig {
  std::size_t capacity = 4096;
  // Entries older than this move to the exemplar bank.
  std::int64_t max_age_ms = 6 * 3600 * 1000LL;
  double hit_cost_ms = 2.0;
};

// Memo of (codes, evidence ids, de-identified entities) -> generated text.
// Entries are immutable once stored; evicted and aged entries are appended
// to the exemplar bank.
class SemanticCache {
 public:
  explicit SemanticCache(SemanticCacheConfig config = {},
                         std::filesystem::path exemplar_path = {});

  // Digest over the codes, the sorted doc ids and the sorted entity set.
  static Digest128 make_key(std::span<const std::uint32_t> codes, std::vector<std::string> doc_ids,
                            std::vector<std::string> entities);

  std::optional<SemanticCacheEntry> lookup(const Digest128& key, std::int64_t now_ms);
  // Returns false when the key is already present; the stored entry wins.
  bool store(SemanticCacheEntry entry);
  // Moves entries older than max_age to the exemplar bank; returns how many.
  std::size_t age_out(std::int64_t now_ms);

  std::size_t size() const;
  std::uint64_t hits() const;
  std::uint64_t misses() const;
  double hit_ratio() const;
  std::vector<SemanticCacheEntry> exemplars() const;
  const SemanticCacheConfig& config() const { return config_; }

 private:
  void archive(const SemanticCacheEntry& entry);

  SemanticCacheConfig config_;
  std::filesystem::path exemplar_path_;
  mutable std::mutex mutex_;
  std::list<SemanticCacheEntry> order_;  // front is most recently used
  std::unordered_map<Digest128, std::list<SemanticCacheEntry>::iterator, Digest128Hash> index_;
  std::vector<SemanticCacheEntry> exemplars_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace senseplane::runtime
