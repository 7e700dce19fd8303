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
#include <cstdint>

#include "senseplane/decision/types.hpp"

namespace senseplane::sim {

// Synthetic ground truth: the chance a served answer is correct falls
// linearly in u, more steeply for the smaller local paths, and is low for
// unknown events unless escalated.
struct OutcomeModel {
  std::array<double, 3> known_base = {0.97, 0.97, 0.96};
  std::array<double, 3> known_slope = {0.75, 0.55, 0.25};
  std::array<double, 3> unknown_base = {0.35, 0.45, 0.80};
  std::array<double, 3> unknown_slope = {0.20, 0.20, 0.10};

  // Zero for Abstain and Rejected.
  double p_correct(decision::Action action, double u, bool unknown) const;
  double expected_loss(decision::Action action, double u, bool unknown) const {
    return 1.0 - p_correct(action, u, unknown);
  }
  // One uniform per event, shared by every action so counterfactual runs
  // see common random numbers.
  bool realized_correct(decision::Action action, double u, bool unknown, std::uint64_t trace_seed,
                        std::size_t event_index) const;
};

}  // namespace senseplane::sim
