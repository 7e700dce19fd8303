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
#include <string>
#include <vector>

#include "senseplane/decision/types.hpp"

namespace senseplane::runtime {

inline constexpr double kDefaultSloMs = 750.0;

struct Request {
  std::uint64_t id = 0;
  double arrival_ms = 0.0;
  double deadline_ms = kDefaultSloMs;
  std::string stream_id;
  int priority = 0;
  // Predicted service time of the cheapest serving path.
  double predicted_service_ms = 0.0;

  static Request make(std::uint64_t id, double arrival_ms, double predicted_service_ms,
                      double slo_ms = kDefaultSloMs);
};

struct SchedulerConfig {
  double batch_window_ms = 50.0;
  std::size_t max_batch = 4;
};

struct Rejection {
  Request request;
  std::string reason;
};

struct Batch {
  std::vector<Request> requests;  // in service order
  std::vector<Rejection> rejected;
};

// Earliest-deadline-first queue with windowed batching and admission
// control. Requests in a batch are served back to back; admission assumes
// that order when projecting completion.
class EdfScheduler {
 public:
  explicit EdfScheduler(SchedulerConfig config = {});

  void submit(Request request);
  // Next batch at `now_ms`. Requests whose projected completion misses the
  // deadline come back in `rejected`, never silently dropped.
  Batch next_batch(double now_ms);

  std::size_t depth() const { return queue_.size(); }
  bool empty() const { return queue_.empty(); }
  const SchedulerConfig& config() const { return config_; }

 private:
  SchedulerConfig config_;
  std::vector<Request> queue_;  // kept sorted by (deadline, arrival, id)
};

struct DownshiftConfig {
  std::size_t high_water = 8;
  std::size_t low_water = 2;
  std::size_t hold_ticks = 3;
};

// Hysteresis controller over fp16 -> int8 -> int4.
class DownshiftController {
 public:
  explicit DownshiftController(DownshiftConfig config = {});

  // One tick with the current queue depth; moves at most one level.
  decision::QuantLevel tick(std::size_t depth);
  decision::QuantLevel level() const { return level_; }

 private:
  DownshiftConfig config_;
  decision::QuantLevel level_ = decision::QuantLevel::kFp16;
  std::size_t above_ = 0;
  std::size_t below_ = 0;
};

}  // namespace senseplane::runtime
