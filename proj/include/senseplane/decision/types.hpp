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
#include <string_view>

namespace senseplane::decision {

// Rejected is an outcome, not a router choice: the scheduler refuses a
// request whose projected completion misses its deadline.
enum class Action { kEdgeOnly, kEdgeRag, kEscalate, kAbstain, kRejected };

inline constexpr std::array<Action, 3> kServingActions = {Action::kEdgeOnly, Action::kEdgeRag,
                                                          Action::kEscalate};

std::string_view to_string(Action action);
Action action_from_string(std::string_view name);

inline std::size_t serving_index(Action a) {
  return a == Action::kEdgeOnly ? 0 : a == Action::kEdgeRag ? 1 : 2;
}

enum class QuantLevel { kFp16 = 0, kInt8 = 1, kInt4 = 2 };

std::string_view to_string(QuantLevel level);
QuantLevel quant_level_from_string(std::string_view name);

struct CostWeights {
  double alpha = 1.0 / 1000.0;  // per ms
  double beta = 0.05;           // per J
  double gamma = 0.0005;        // per token
  double delta = 1.0;           // per unit risk
};

struct CostVector {
  double lat_ms = 0.0;
  double energy_j = 0.0;
  double tokens = 0.0;
  double risk = 0.0;
  CostWeights weights;
  double total = 0.0;
  // Set when predictions came from priors because the predictor is untrained.
  bool from_priors = false;

  double recompute_total() const {
    return weights.alpha * lat_ms + weights.beta * energy_j + weights.gamma * tokens +
           weights.delta * risk;
  }
};

}  // namespace senseplane::decision
