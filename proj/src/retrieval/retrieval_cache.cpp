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

#include "senseplane/retrieval/retrieval_cache.hpp"

#include "senseplane/error.hpp"

namespace senseplane::retrieval {

RetrievalCache::RetrievalCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) fail(ErrorCode::kInvalidArgument, "cache capacity must be positive");
}

std::optional<std::vector<std::string>> RetrievalCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->second;
}

void RetrievalCache::put(const std::string& key, std::vector<std::string> doc_ids) {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it != entries_.end()) {
    it->second->second = std::move(doc_ids);
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  order_.emplace_front(key, std::move(doc_ids));
  entries_[key] = order_.begin();
  if (order_.size() > capacity_) {
    entries_.erase(order_.back().first);
    order_.pop_back();
  }
}

void RetrievalCache::clear() {
  std::lock_guard lock(mutex_);
  order_.clear();
  entries_.clear();
  hits_ = 0;
  misses_ = 0;
}

std::size_t RetrievalCache::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

std::uint64_t RetrievalCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::uint64_t RetrievalCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

double RetrievalCache::hit_ratio() const {
  std::lock_guard lock(mutex_);
  const std::uint64_t total = hits_ + misses_;
  return total == 0 ? 0.0 : static_cast<double>(hits_) / static_cast<double>(total);
}

}  // namespace senseplane::retrieval
