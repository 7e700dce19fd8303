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

#include "senseplane/codec/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "senseplane/error.hpp"
#include "senseplane/random.hpp"

namespace senseplane::codec {

UsageWindow::UsageWindow(std::size_t codes, std::size_t capacity)
    : capacity_(capacity), counts_(codes, 0) {}

void UsageWindow::record(std::uint32_t code) {
  if (capacity_ == 0) return;
  history_.push_back(code);
  ++counts_.at(code);
  if (history_.size() > capacity_) {
    --counts_[history_.front()];
    history_.pop_front();
  }
}

void UsageWindow::reset(std::uint32_t code) {
  std::erase(history_, code);
  counts_.at(code) = 0;
}

double UsageWindow::share(std::uint32_t code) const {
  if (history_.empty()) return 0.0;
  return static_cast<double>(counts_.at(code)) / static_cast<double>(history_.size());
}

Codebook::Codebook(RowMatrix vectors, CodebookConfig config)
    : vectors_(std::move(vectors)),
      ema_counts_(vectors_.rows(), 0.0),
      ema_sums_(vectors_.rows(), vectors_.cols()),
      config_(config),
      usage_(vectors_.rows(), config.usage_capacity) {
  if (vectors_.rows() < 2) fail(ErrorCode::kEmptyCodebook, "codebook needs at least 2 codes");
  if (vectors_.cols() == 0) fail(ErrorCode::kDimensionMismatch, "codebook dimension is zero");
  if (!(config_.decay > 0.0 && config_.decay < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "EMA decay must lie in (0, 1)");
  }
  if (!(config_.commitment_beta > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "commitment beta must be positive");
  }
  for (const double v : vectors_.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteInput, "codebook vector is not finite");
  }
}

Codebook update_codebook(Codebook codebook, std::span<const Assignment> assignments) {
  if (assignments.empty()) fail(ErrorCode::kInvalidArgument, "no assignments to apply");
  const std::size_t v = codebook.size();
  const std::size_t d = codebook.dim();
  std::vector<double> n(v, 0.0);
  RowMatrix sums(v, d);
  double distance_total = 0.0;
  for (const Assignment& a : assignments) {
    if (a.code >= v) fail(ErrorCode::kIndexOutOfRange, "assignment code outside codebook");
    if (a.embedding.size() != d) {
      fail(ErrorCode::kDimensionMismatch, "assignment embedding dimension mismatch");
    }
    n[a.code] += 1.0;
    auto row = sums.row(a.code);
    for (std::size_t j = 0; j < d; ++j) row[j] += a.embedding[j];
    distance_total += squared_distance(a.embedding, codebook.vector(a.code));
  }

  const double decay = codebook.decay();
  auto& counts = codebook.mutable_ema_counts();
  auto& ema_sums = codebook.mutable_ema_sums();
  auto& vectors = codebook.mutable_vectors();
  for (std::size_t i = 0; i < v; ++i) {
    counts[i] = decay * counts[i] + (1.0 - decay) * n[i];
    auto s = ema_sums.row(i);
    const auto batch = sums.row(i);
    for (std::size_t j = 0; j < d; ++j) s[j] = decay * s[j] + (1.0 - decay) * batch[j];
    if (n[i] > 0.0) {
      const double denom = std::max(counts[i], kEmaEpsilon);
      auto c = vectors.row(i);
      for (std::size_t j = 0; j < d; ++j) c[j] = s[j] / denom;
    }
  }
  for (const Assignment& a : assignments) codebook.mutable_usage().record(a.code);

  const double mean_distance = distance_total / static_cast<double>(assignments.size());
  const double sd = codebook.config().distance_scale_decay;
  const double scale = codebook.distance_scale_fitted()
                           ? sd * codebook.distance_scale() + (1.0 - sd) * mean_distance
                           : mean_distance;
  if (scale > 0.0) codebook.set_distance_scale(scale);
  return codebook;
}

std::vector<std::uint32_t> find_dead_codes(const Codebook& codebook, const RefreshConfig& config) {
  std::vector<std::uint32_t> dead;
  const UsageWindow& usage = codebook.usage();
  if (usage.recorded() < config.min_window || usage.recorded() == 0) return dead;
  const double threshold = config.utilization_threshold / static_cast<double>(codebook.size());
  for (std::uint32_t i = 0; i < codebook.size(); ++i) {
    if (usage.share(i) < threshold) dead.push_back(i);
  }
  return dead;
}

RefreshResult refresh_dead_codes(Codebook codebook, std::span<const std::vector<double>> pool,
                                 const RefreshConfig& config, std::uint64_t seed) {
  std::vector<std::uint32_t> dead = find_dead_codes(codebook, config);
  if (dead.empty()) return {std::move(codebook), {}};
  if (pool.empty()) fail(ErrorCode::kEmptyPool, "dead codes found but no recent embeddings");
  Rng rng(derive_seed(seed, "dead-code-refresh"));
  const std::size_t d = codebook.dim();
  for (const std::uint32_t code : dead) {
    const std::vector<double>& sample = pool[rng.index(pool.size())];
    if (sample.size() != d) fail(ErrorCode::kDimensionMismatch, "pool embedding dimension");
    auto c = codebook.mutable_vectors().row(code);
    std::copy(sample.begin(), sample.end(), c.begin());
    codebook.mutable_ema_counts()[code] = 0.0;
    auto s = codebook.mutable_ema_sums().row(code);
    std::fill(s.begin(), s.end(), 0.0);
    codebook.mutable_usage().reset(code);
  }
  return {std::move(codebook), std::move(dead)};
}

Codebook kmeans_init(std::span<const std::vector<double>> pool, std::size_t codes,
                     std::size_t iterations, std::uint64_t seed, CodebookConfig config) {
  if (pool.size() < codes) fail(ErrorCode::kEmptyPool, "k-means pool smaller than codebook");
  if (codes < 2) fail(ErrorCode::kEmptyCodebook, "codebook needs at least 2 codes");
  const std::size_t d = pool.front().size();
  Rng rng(derive_seed(seed, "kmeans"));
  RowMatrix centers(codes, d);

  // k-means++ seeding.
  std::vector<double> nearest(pool.size(), std::numeric_limits<double>::infinity());
  std::size_t pick = rng.index(pool.size());
  for (std::size_t c = 0; c < codes; ++c) {
    std::copy(pool[pick].begin(), pool[pick].end(), centers.row(c).begin());
    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(pool[i], centers.row(c)));
      total += nearest[i];
    }
    if (c + 1 == codes) break;
    if (total <= 0.0) {
      pick = rng.index(pool.size());
      continue;
    }
    double target = rng.uniform() * total;
    pick = pool.size() - 1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      target -= nearest[i];
      if (target <= 0.0) {
        pick = i;
        break;
      }
    }
  }

  std::vector<std::size_t> owner(pool.size(), 0);
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < codes; ++c) {
        const double dist = squared_distance(pool[i], centers.row(c));
        if (dist < best) {
          best = dist;
          owner[i] = c;
        }
      }
    }
    RowMatrix sums(codes, d);
    std::vector<std::size_t> counts(codes, 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      auto row = sums.row(owner[i]);
      for (std::size_t j = 0; j < d; ++j) row[j] += pool[i][j];
      ++counts[owner[i]];
    }
    for (std::size_t c = 0; c < codes; ++c) {
      if (counts[c] == 0) continue;  // keep the previous center for empty clusters
      auto center = centers.row(c);
      const auto row = sums.row(c);
      for (std::size_t j = 0; j < d; ++j) center[j] = row[j] / static_cast<double>(counts[c]);
    }
  }
  return Codebook(std::move(centers), config);
}

CodebookStore::CodebookStore(Codebook initial)
    : current_(std::make_shared<const Codebook>(std::move(initial))) {}

std::shared_ptr<const Codebook> CodebookStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

void CodebookStore::replace(Codebook next) {
  std::lock_guard writer(write_mutex_);
  replace_locked(std::move(next));
}

void CodebookStore::replace_locked(Codebook next) {
  auto built = std::make_shared<const Codebook>(std::move(next));
  std::lock_guard lock(mutex_);
  current_ = std::move(built);
}

}  // namespace senseplane::codec
