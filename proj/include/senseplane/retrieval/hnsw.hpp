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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "senseplane/random.hpp"

namespace senseplane::retrieval {

struct HnswParams {
  std::size_t m = 32;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 64;
  std::uint64_t seed = 42;
};

// Hierarchical navigable small-world graph over unit vectors with cosine
// distance (1 - <a,b>). Internal ids are insertion order.
class HnswGraph {
 public:
  struct Neighbor {
    float distance;
    std::uint32_t id;
  };

  HnswGraph(std::size_t dim, HnswParams params = {});

  std::uint32_t add(std::span<const float> vector);
  // Up to `k` approximate nearest neighbours, nearest first. `ef` is raised
  // to at least k.
  std::vector<Neighbor> search(std::span<const float> query, std::size_t k,
                               std::size_t ef) const;

  std::size_t size() const { return levels_.size(); }
  std::size_t dim() const { return dim_; }
  const HnswParams& params() const { return params_; }
  std::span<const float> vector(std::uint32_t id) const {
    return {vectors_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }

  std::string serialize() const;
  static HnswGraph deserialize(std::string_view bytes);

 private:
  float distance(std::span<const float> a, std::uint32_t b) const;
  std::vector<Neighbor> search_layer(std::span<const float> query, std::uint32_t entry,
                                     std::size_t ef, int level) const;
  std::vector<std::uint32_t> select_neighbors(std::vector<Neighbor> candidates,
                                              std::size_t max_links) const;
  std::size_t max_links(int level) const { return level == 0 ? 2 * params_.m : params_.m; }
  void shrink_links(std::uint32_t node, int level);

  std::size_t dim_;
  HnswParams params_;
  std::vector<float> vectors_;
  std::vector<int> levels_;
  // links_[node][level] -> neighbour ids
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;
  std::uint32_t entry_ = 0;
  int max_level_ = -1;
  Rng rng_;
};

}  // namespace senseplane::retrieval
