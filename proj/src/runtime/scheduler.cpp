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

#include "senseplane/runtime/scheduler.hpp"

#include <algorithm>

#include "senseplane/error.hpp"

namespace senseplane::runtime {
namespace {

bool edf_before(const Request& a, const Request& b) {
  if (a.deadline_ms != b.deadline_ms) return a.deadline_ms < b.deadline_ms;
  if (a.arrival_ms != b.arrival_ms) return a.arrival_ms < b.arrival_ms;
  return a.id < b.id;
}

}  // namespace

Request Request::make(std::uint64_t id, double arrival_ms, double predicted_service_ms, double slo_ms) {
  Request r;
  r.id = id;
  r.arrival_ms = arrival_ms;
  r.deadline_ms = arrival_ms + slo_ms;
  r.predicted_service_ms = predicted_service_ms;
  return r;
}

EdfScheduler::EdfScheduler(SchedulerConfig config) : config_(config) {
  if (config_.max_batch == 0) fail(ErrorCode::kConfigError, "max_batch must be positive");
  if (!(config_.batch_window_ms >= 0.0)) fail(ErrorCode::kConfigError, "batch window must be non-negative");
}

void EdfScheduler::submit(Request request) {
  if (!(request.deadline_ms > request.arrival_ms)) {
    fail(ErrorCode::kInvalidArgument, "deadline must follow arrival");
  }
  const auto pos = std::upper_bound(queue_.begin(), queue_.end(), request, edf_before);
  queue_.insert(pos, std::move(request));
}

Batch EdfScheduler::next_batch(double now_ms) {
  Batch batch;
  double clock = now_ms;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Request> keep;
  for (auto& r : queue_) {
    if (batch.requests.size() >= config_.max_batch) {
      keep.push_back(std::move(r));
      continue;
    }
    if (!batch.requests.empty()) {
      const double new_lo = std::min(lo, r.arrival_ms);
      const double new_hi = std::max(hi, r.arrival_ms);
      if (new_hi - new_lo > config_.batch_window_ms) {
        keep.push_back(std::move(r));
        continue;
      }
    }
    const double completion = clock + r.predicted_service_ms;
    if (completion > r.deadline_ms) {
      batch.rejected.push_back({std::move(r), "projected completion " + std::to_string(completion) +
                                                   " ms exceeds deadline"});
      continue;
    }
    if (batch.requests.empty()) {
      lo = hi = r.arrival_ms;
    } else {
      lo = std::min(lo, r.arrival_ms);
      hi = std::max(hi, r.arrival_ms);
    }
    clock = completion;
    batch.requests.push_back(std::move(r));
  }
  queue_ = std::move(keep);
  return batch;
}

DownshiftController::DownshiftController(DownshiftConfig config) : config_(config) {
  if (config_.low_water > config_.high_water || config_.hold_ticks == 0) {
    fail(ErrorCode::kConfigError, "downshift requires low_water <= high_water and hold_ticks > 0");
  }
}

decision::QuantLevel DownshiftController::tick(std::size_t depth) {
  if (depth > config_.high_water) {
    ++above_;
    below_ = 0;
  } else if (depth < config_.low_water) {
    ++below_;
    above_ = 0;
  } else {
    above_ = 0;
    below_ = 0;
  }
  auto level = static_cast<int>(level_);
  if (above_ >= config_.hold_ticks && level < 2) {
    ++level;
    above_ = 0;
  } else if (below_ >= config_.hold_ticks && level > 0) {
    --level;
    below_ = 0;
  }
  level_ = static_cast<decision::QuantLevel>(level);
  return level_;
}

}  // namespace senseplane::runtime
