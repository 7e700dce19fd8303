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

#include "senseplane/runtime/latency.hpp"

#include <algorithm>
#include <cmath>

#include "senseplane/error.hpp"

namespace senseplane::runtime {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kEncode: return "encode";
    case Stage::kRetrieval: return "retrieval";
    case Stage::kRouting: return "routing";
    case Stage::kPrefill: return "prefill";
    case Stage::kDecode: return "decode";
    case Stage::kPost: return "post";
  }
  return "encode";
}

StageTable StageTable::reference() {
  StageTable t;
  t.stages[0] = {LognormalStage{48, 60}, LognormalStage{0, 0}, LognormalStage{5, 9},
                 LognormalStage{80, 140}, LognormalStage{160, 240}, LognormalStage{12, 20}};
  t.stages[1] = {LognormalStage{49, 62}, LognormalStage{18, 32}, LognormalStage{6, 10},
                 LognormalStage{84, 150}, LognormalStage{175, 250}, LognormalStage{14, 22}};
  t.stages[2] = {LognormalStage{49, 62}, LognormalStage{21, 36}, LognormalStage{7, 12},
                 LognormalStage{210, 380}, LognormalStage{420, 690}, LognormalStage{18, 28}};
  return t;
}

StageScores StageScores::draw(Rng& rng, double correlation) {
  const double c = std::sqrt(std::clamp(correlation, 0.0, 1.0));
  const double r = std::sqrt(1.0 - c * c);
  StageScores s;
  const double common = rng.normal();
  for (double& z : s.z) z = c * common + r * rng.normal();
  s.link_z = rng.normal();
  s.burst_u = rng.uniform();
  return s;
}

LinkProfile LinkProfile::good() {
  LinkProfile l;
  l.name = "good";
  l.down_mbps = 100.0;
  l.up_mbps = 20.0;
  l.rtt_ms = 15.0;
  return l;
}

LinkProfile LinkProfile::moderate() { return LinkProfile{}; }

LinkProfile LinkProfile::poor() {
  LinkProfile l;
  l.name = "poor";
  l.down_mbps = 8.0;
  l.up_mbps = 4.0;
  l.rtt_ms = 80.0;
  l.jitter_sigma = 0.15;
  l.burst_probability = 0.05;
  return l;
}

LinkProfile LinkProfile::by_name(std::string_view name) {
  if (name == "good") return good();
  if (name == "moderate") return moderate();
  if (name == "poor") return poor();
  fail(ErrorCode::kConfigError, "unknown link profile: " + std::string(name));
}

void LinkProfile::validate() const {
  if (!(down_mbps > 0.0 && up_mbps > 0.0 && rtt_ms > 0.0)) {
    fail(ErrorCode::kConfigError, "link rates and RTT must be positive");
  }
  if (!(jitter_sigma >= 0.0) || !(burst_probability >= 0.0 && burst_probability <= 1.0) ||
      !(burst_capacity > 0.0 && burst_capacity <= 1.0)) {
    fail(ErrorCode::kConfigError, "link jitter or burst parameters out of range");
  }
}

LinkDraw draw_link(const LinkProfile& link, const StageScores& scores) {
  LinkDraw d;
  d.rtt_ms = link.rtt_ms * std::exp(link.jitter_sigma * scores.link_z);
  const double capacity = scores.burst_u < link.burst_probability ? link.burst_capacity : 1.0;
  d.up_mbps = link.up_mbps * capacity;
  d.down_mbps = link.down_mbps * capacity;
  return d;
}

double transfer_ms(double bytes, double mbps) { return bytes * 8.0 / (mbps * 1000.0); }

}  // namespace senseplane::runtime
