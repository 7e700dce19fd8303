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
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "senseplane/matrix.hpp"

namespace senseplane::codec {

// Per-code assignment counts over the most recent `capacity` assignments.
class UsageWindow {
 public:
  UsageWindow(std::size_t codes = 0, std::size_t capacity = 0);

  void record(std::uint32_t code);
  // Drops every recorded assignment of `code` from the window.
  void reset(std::uint32_t code);

  std::size_t capacity() const { return capacity_; }
  std::size_t recorded() const { return history_.size(); }
  std::size_t count(std::uint32_t code) const { return counts_.at(code); }
  double share(std::uint32_t code) const;
  const std::deque<std::uint32_t>& history() const { return history_; }

 private:
  std::size_t capacity_;
  std::deque<std::uint32_t> history_;
  std::vector<std::size_t> counts_;
};

struct CodebookConfig {
  double decay = 0.99;
  double commitment_beta = 0.25;
  std::size_t usage_capacity = 1024;
  // Smoothing for the running mean quantization distance used as the
  // confidence scale.
  double distance_scale_decay = 0.99;
};

// V x d codebook with EMA statistics. Values are immutable once shared via a
// CodebookStore; updates produce a new Codebook.
class Codebook {
 public:
  Codebook(RowMatrix vectors, CodebookConfig config = {});

  std::size_t size() const { return vectors_.rows(); }
  std::size_t dim() const { return vectors_.cols(); }
  std::span<const double> vector(std::size_t code) const { return vectors_.row(code); }

  const RowMatrix& vectors() const { return vectors_; }
  const std::vector<double>& ema_counts() const { return ema_counts_; }
  const RowMatrix& ema_sums() const { return ema_sums_; }
  double decay() const { return config_.decay; }
  double commitment_beta() const { return config_.commitment_beta; }
  const CodebookConfig& config() const { return config_; }
  const UsageWindow& usage() const { return usage_; }
  // Running mean squared quantization distance; 1.0 before any update.
  double distance_scale() const { return distance_scale_; }

  // Raw state access for persistence and the update operations.
  RowMatrix& mutable_vectors() { return vectors_; }
  std::vector<double>& mutable_ema_counts() { return ema_counts_; }
  RowMatrix& mutable_ema_sums() { return ema_sums_; }
  UsageWindow& mutable_usage() { return usage_; }
  void set_distance_scale(double scale) {
    distance_scale_ = scale;
    distance_scale_fitted_ = true;
  }
  bool distance_scale_fitted() const { return distance_scale_fitted_; }

 private:
  RowMatrix vectors_;
  std::vector<double> ema_counts_;
  RowMatrix ema_sums_;
  CodebookConfig config_;
  UsageWindow usage_;
  double distance_scale_ = 1.0;
  bool distance_scale_fitted_ = false;
};

struct Assignment {
  std::vector<double> embedding;
  std::uint32_t code = 0;
};

inline constexpr double kEmaEpsilon = 1e-12;

// EMA update: counts and sums decay for every code, vectors are re-estimated
// only for codes that received assignments in this batch.
Codebook update_codebook(Codebook codebook, std::span<const Assignment> assignments);

struct RefreshConfig {
  // Minimum recorded assignments before dead-code detection runs.
  std::size_t min_window = 256;
  // A code is dead when its share of the window is below threshold / V.
  double utilization_threshold = 0.30;
};

struct RefreshResult {
  Codebook codebook;
  std::vector<std::uint32_t> refreshed;
};

std::vector<std::uint32_t> find_dead_codes(const Codebook& codebook, const RefreshConfig& config);

// Reassigns each dead code to a uniformly sampled recent embedding (seeded).
// Throws kEmptyPool when a refresh is needed but `pool` is empty.
RefreshResult refresh_dead_codes(Codebook codebook, std::span<const std::vector<double>> pool,
                                 const RefreshConfig& config, std::uint64_t seed);

// k-means++ seeding followed by Lloyd iterations over pooled embeddings.
Codebook kmeans_init(std::span<const std::vector<double>> pool, std::size_t codes,
                     std::size_t iterations, std::uint64_t seed, CodebookConfig config = {});

// Snapshot holder: readers get an immutable shared snapshot, writers swap in
// a fully built replacement.
class CodebookStore {
 public:
  explicit CodebookStore(Codebook initial);

  std::shared_ptr<const Codebook> snapshot() const;
  void replace(Codebook next);
  template <typename Fn>
  void mutate(Fn&& fn) {
    std::lock_guard writer(write_mutex_);
    Codebook next = *snapshot();
    next = fn(std::move(next));
    replace_locked(std::move(next));
  }

 private:
  void replace_locked(Codebook next);

  mutable std::mutex mutex_;
  std::mutex write_mutex_;
  std::shared_ptr<const Codebook> current_;
};

}  // namespace senseplane::codec
