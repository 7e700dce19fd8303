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
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace senseplane::retrieval {

// LRU map from a code-sequence key to the doc ids retrieved for it, so
// adjacent windows with the same codes skip the search.
class RetrievalCache {
 public:
  explicit RetrievalCache(std::size_t capacity = 256);

  std::optional<std::vector<std::string>> get(const std::string& key);
  void put(const std::string& key, std::vector<std::string> doc_ids);
  void clear();

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::uint64_t hits() const;
  std::uint64_t misses() const;
  double hit_ratio() const;

 private:
  using Entry = std::pair<std::string, std::vector<std::string>>;

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> order_;  // front is most recent
  std::unordered_map<std::string, std::list<Entry>::iterator> entries_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace senseplane::retrieval
