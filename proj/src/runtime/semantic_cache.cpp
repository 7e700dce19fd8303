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

#include "senseplane/runtime/semantic_cache.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "senseplane/error.hpp"

namespace senseplane::runtime {

SemanticCache::SemanticCache(SemanticCacheConfig config, std::filesystem::path exemplar_path)
    : config_(config), exemplar_path_(std::move(exemplar_path)) {
  if (config_.capacity == 0) fail(ErrorCode::kConfigError, "semantic cache capacity must be positive");
}

Digest128 SemanticCache::make_key(std::span<const std::uint32_t> codes, std::vector<std::string> doc_ids,
                                  std::vector<std::string> entities) {
  std::sort(doc_ids.begin(), doc_ids.end());
  std::sort(entities.begin(), entities.end());
  entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
  DigestBuilder b;
  b.add(static_cast<std::uint64_t>(codes.size()));
  for (const auto c : codes) b.add(static_cast<std::uint64_t>(c));
  b.add(static_cast<std::uint64_t>(doc_ids.size()));
  for (const auto& d : doc_ids) b.add(d);
  b.add(static_cast<std::uint64_t>(entities.size()));
  for (const auto& e : entities) b.add(e);
  return b.finish();
}

std::optional<SemanticCacheEntry> SemanticCache::lookup(const Digest128& key, std::int64_t now_ms) {
  std::lock_guard lock(mutex_);
  const auto it = index_.find(key);
  if (it == index_.end() || now_ms - it->second->created_ms > config_.max_age_ms) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  ++it->second->hits;
  order_.splice(order_.begin(), order_, it->second);
  return *it->second;
}

bool SemanticCache::store(SemanticCacheEntry entry) {
  std::lock_guard lock(mutex_);
  if (index_.count(entry.key) != 0) return false;
  order_.push_front(std::move(entry));
  index_[order_.front().key] = order_.begin();
  if (order_.size() > config_.capacity) {
    archive(order_.back());
    index_.erase(order_.back().key);
    order_.pop_back();
  }
  return true;
}

std::size_t SemanticCache::age_out(std::int64_t now_ms) {
  std::lock_guard lock(mutex_);
  std::size_t moved = 0;
  for (auto it = order_.begin(); it != order_.end();) {
    if (now_ms - it->created_ms > config_.max_age_ms) {
      archive(*it);
      index_.erase(it->key);
      it = order_.erase(it);
      ++moved;
    } else {
      ++it;
    }
  }
  return moved;
}

void SemanticCache::archive(const SemanticCacheEntry& entry) {
  exemplars_.push_back(entry);
  if (exemplar_path_.empty()) return;
  std::ofstream out(exemplar_path_, std::ios::app);
  if (!out) fail(ErrorCode::kIoError, "cannot append to exemplar bank " + exemplar_path_.string());
  const nlohmann::ordered_json j = {{"key", entry.key.hex()},
                                    {"action", std::string(decision::to_string(entry.action))},
                                    {"text", entry.text},
                                    {"prompt_checksum", entry.prompt_checksum},
                                    {"created_ms", entry.created_ms},
                                    {"hits", entry.hits}};
  out << j.dump() << '\n';
}

std::size_t SemanticCache::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

std::uint64_t SemanticCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::uint64_t SemanticCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

double SemanticCache::hit_ratio() const {
  std::lock_guard lock(mutex_);
  const auto total = hits_ + misses_;
  return total == 0 ? 0.0 : static_cast<double>(hits_) / static_cast<double>(total);
}

std::vector<SemanticCacheEntry> SemanticCache::exemplars() const {
  std::lock_guard lock(mutex_);
  return exemplars_;
}

}  // namespace senseplane::runtime
