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

#include "senseplane/retrieval/hnsw.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <unordered_set>

#include "senseplane/error.hpp"

namespace senseplane::retrieval {
namespace {

struct Closer {
  bool operator()(const HnswGraph::Neighbor& a, const HnswGraph::Neighbor& b) const {
    return a.distance > b.distance || (a.distance == b.distance && a.id > b.id);
  }
};
struct Farther {
  bool operator()(const HnswGraph::Neighbor& a, const HnswGraph::Neighbor& b) const {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  }
};

template <typename T>
void put(std::string& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename T>
T get(std::string_view bytes, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  if (pos + sizeof(T) > bytes.size()) fail(ErrorCode::kFormatError, "graph file truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  return std::bit_cast<T>(bits);
}

}  // namespace

HnswGraph::HnswGraph(std::size_t dim, HnswParams params)
    : dim_(dim), params_(params), rng_(params.seed) {
  if (dim_ == 0) fail(ErrorCode::kInvalidArgument, "graph dimension must be positive");
  if (params_.m < 2) fail(ErrorCode::kInvalidArgument, "HNSW M must be at least 2");
}

float HnswGraph::distance(std::span<const float> a, std::uint32_t b) const {
  const float* v = vectors_.data() + static_cast<std::size_t>(b) * dim_;
  float s = 0.0f;
  for (std::size_t i = 0; i < dim_; ++i) s += a[i] * v[i];
  return 1.0f - s;
}

std::vector<HnswGraph::Neighbor> HnswGraph::search_layer(std::span<const float> query,
                                                         std::uint32_t entry, std::size_t ef,
                                                         int level) const {
  std::vector<bool> visited(size(), false);
  std::priority_queue<Neighbor, std::vector<Neighbor>, Closer> candidates;
  std::priority_queue<Neighbor, std::vector<Neighbor>, Farther> found;
  const Neighbor start{distance(query, entry), entry};
  candidates.push(start);
  found.push(start);
  visited[entry] = true;
  while (!candidates.empty()) {
    const Neighbor current = candidates.top();
    if (current.distance > found.top().distance && found.size() >= ef) break;
    candidates.pop();
    for (const std::uint32_t next : links_[current.id][level]) {
      if (visited[next]) continue;
      visited[next] = true;
      const float d = distance(query, next);
      if (found.size() < ef || d < found.top().distance) {
        candidates.push({d, next});
        found.push({d, next});
        if (found.size() > ef) found.pop();
      }
    }
  }
  std::vector<Neighbor> out;
  out.reserve(found.size());
  while (!found.empty()) {
    out.push_back(found.top());
    found.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Diversity heuristic: keep a candidate only if it is closer to the base
// than to every neighbour already kept; top up with pruned ones if short.
std::vector<std::uint32_t> HnswGraph::select_neighbors(std::vector<Neighbor> candidates,
                                                       std::size_t max_links) const {
  std::sort(candidates.begin(), candidates.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  });
  std::vector<std::uint32_t> kept;
  std::vector<std::uint32_t> pruned;
  for (const Neighbor& c : candidates) {
    if (kept.size() >= max_links) break;
    bool good = true;
    for (const std::uint32_t k : kept) {
      if (distance(vector(c.id), k) < c.distance) {
        good = false;
        break;
      }
    }
    (good ? kept : pruned).push_back(c.id);
  }
  for (std::size_t i = 0; i < pruned.size() && kept.size() < max_links; ++i) {
    kept.push_back(pruned[i]);
  }
  return kept;
}

void HnswGraph::shrink_links(std::uint32_t node, int level) {
  auto& links = links_[node][level];
  const std::size_t limit = max_links(level);
  if (links.size() <= limit) return;
  std::vector<Neighbor> candidates;
  candidates.reserve(links.size());
  for (const std::uint32_t n : links) candidates.push_back({distance(vector(node), n), n});
  links = select_neighbors(std::move(candidates), limit);
}

std::uint32_t HnswGraph::add(std::span<const float> vec) {
  if (vec.size() != dim_) fail(ErrorCode::kDimensionMismatch, "vector dimension mismatch");
  const auto id = static_cast<std::uint32_t>(size());
  vectors_.insert(vectors_.end(), vec.begin(), vec.end());
  const double ml = 1.0 / std::log(static_cast<double>(params_.m));
  const int level = static_cast<int>(std::floor(-std::log(1.0 - rng_.uniform()) * ml));
  levels_.push_back(level);
  links_.emplace_back(static_cast<std::size_t>(level) + 1);

  if (max_level_ < 0) {
    entry_ = id;
    max_level_ = level;
    return id;
  }

  std::uint32_t entry = entry_;
  const std::span<const float> q = vector(id);
  for (int l = max_level_; l > level; --l) {
    bool improved = true;
    float best = distance(q, entry);
    while (improved) {
      improved = false;
      for (const std::uint32_t n : links_[entry][l]) {
        const float d = distance(q, n);
        if (d < best) {
          best = d;
          entry = n;
          improved = true;
        }
      }
    }
  }
  for (int l = std::min(level, max_level_); l >= 0; --l) {
    std::vector<Neighbor> found = search_layer(q, entry, params_.ef_construction, l);
    entry = found.front().id;
    links_[id][l] = select_neighbors(found, params_.m);
    for (const std::uint32_t n : links_[id][l]) {
      links_[n][l].push_back(id);
      shrink_links(n, l);
    }
  }
  if (level > max_level_) {
    max_level_ = level;
    entry_ = id;
  }
  return id;
}

std::vector<HnswGraph::Neighbor> HnswGraph::search(std::span<const float> query, std::size_t k,
                                                   std::size_t ef) const {
  if (query.size() != dim_) fail(ErrorCode::kDimensionMismatch, "query dimension mismatch");
  if (size() == 0 || k == 0) return {};
  std::uint32_t entry = entry_;
  for (int l = max_level_; l > 0; --l) {
    bool improved = true;
    float best = distance(query, entry);
    while (improved) {
      improved = false;
      for (const std::uint32_t n : links_[entry][l]) {
        const float d = distance(query, n);
        if (d < best) {
          best = d;
          entry = n;
          improved = true;
        }
      }
    }
  }
  std::vector<Neighbor> found = search_layer(query, entry, std::max(ef, k), 0);
  if (found.size() > k) found.resize(k);
  return found;
}

std::string HnswGraph::serialize() const {
  std::string out = "HNSW";
  put<std::uint64_t>(out, dim_);
  put<std::uint64_t>(out, params_.m);
  put<std::uint64_t>(out, params_.ef_construction);
  put<std::uint64_t>(out, params_.ef_search);
  put<std::uint64_t>(out, params_.seed);
  put<std::uint64_t>(out, size());
  put<std::uint32_t>(out, entry_);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(max_level_));
  for (const float v : vectors_) put<float>(out, v);
  for (std::size_t n = 0; n < size(); ++n) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(levels_[n]));
    for (const auto& level : links_[n]) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(level.size()));
      for (const std::uint32_t id : level) put<std::uint32_t>(out, id);
    }
  }
  return out;
}

HnswGraph HnswGraph::deserialize(std::string_view bytes) {
  if (bytes.substr(0, 4) != "HNSW") fail(ErrorCode::kFormatError, "bad graph magic");
  std::size_t pos = 4;
  const auto dim = get<std::uint64_t>(bytes, pos);
  HnswParams params;
  params.m = get<std::uint64_t>(bytes, pos);
  params.ef_construction = get<std::uint64_t>(bytes, pos);
  params.ef_search = get<std::uint64_t>(bytes, pos);
  params.seed = get<std::uint64_t>(bytes, pos);
  const auto count = get<std::uint64_t>(bytes, pos);
  HnswGraph graph(dim, params);
  graph.entry_ = get<std::uint32_t>(bytes, pos);
  graph.max_level_ = static_cast<int>(get<std::uint32_t>(bytes, pos));
  graph.vectors_.resize(count * dim);
  for (float& v : graph.vectors_) v = get<float>(bytes, pos);
  graph.levels_.resize(count);
  graph.links_.resize(count);
  for (std::size_t n = 0; n < count; ++n) {
    graph.levels_[n] = static_cast<int>(get<std::uint32_t>(bytes, pos));
    graph.links_[n].resize(static_cast<std::size_t>(graph.levels_[n]) + 1);
    for (auto& level : graph.links_[n]) {
      level.resize(get<std::uint32_t>(bytes, pos));
      for (std::uint32_t& id : level) {
        id = get<std::uint32_t>(bytes, pos);
        if (id >= count) fail(ErrorCode::kFormatError, "graph link out of range");
      }
    }
  }
  if (count == 0) graph.max_level_ = -1;
  // Continue the level stream deterministically after a reload.
  for (std::size_t n = 0; n < count; ++n) graph.rng_.uniform();
  return graph;
}

}  // namespace senseplane::retrieval
