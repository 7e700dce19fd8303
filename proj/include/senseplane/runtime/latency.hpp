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

#include <array>
#include <string>
#include <string_view>

#include "senseplane/decision/types.hpp"
#include "senseplane/random.hpp"

namespace senseplane::runtime {

enum class Stage { kEncode, kRetrieval, kRouting, kPrefill, kDecode, kPost };
inline constexpr std::size_t kStageCount = 6;

std::string_view to_string(Stage stage);

using StageArray = std::array<double, kStageCount>;

// Per-action lognormal stage latencies (median, p95) at fp16 and reference
// output length. A zero median marks a stage the action does not run.
struct StageTable {
  std::array<std::array<LognormalStage, kStageCount>, 3> stages{};
  // Shared component of the per-stage normal scores; stages of one request
  // tend to be slow together.
  double correlation = 0.8;

  const LognormalStage& at(decision::Action action, Stage stage) const {
    return stages[decision::serving_index(action)][static_cast<std::size_t>(stage)];
  }
  LognormalStage& at(decision::Action action, Stage stage) {
    return stages[decision::serving_index(action)][static_cast<std::size_t>(stage)];
  }

  // Medians and p95s of the reference edge deployment.
  static StageTable reference();
};

// Correlated standard-normal scores, one per stage plus one for link jitter.
struct StageScores {
  StageArray z{};
  double link_z = 0.0;
  double burst_u = 1.0;

  static StageScores draw(Rng& rng, double correlation);
};

struct LinkProfile {
  std::string name = "moderate";
  double down_mbps = 30.0;
  double up_mbps = 10.0;
  double rtt_ms = 40.0;
  // Multiplicative lognormal jitter on the RTT.
  double jitter_sigma = 0.1;
  // Background bursts: with this probability the link runs at
  // `burst_capacity` of its nominal rates.
  double burst_probability = 0.02;
  double burst_capacity = 0.5;
  bool up = true;

  static LinkProfile good();
  static LinkProfile moderate();
  static LinkProfile poor();
  static LinkProfile by_name(std::string_view name);
  void validate() const;
};

// Link condition for one message exchange.
struct LinkDraw {
  double rtt_ms = 0.0;
  double up_mbps = 0.0;
  double down_mbps = 0.0;
};

LinkDraw draw_link(const LinkProfile& link, const StageScores& scores);

// Transfer time in ms for `bytes` at `mbps`.
double transfer_ms(double bytes, double mbps);

}  // namespace senseplane::runtime
