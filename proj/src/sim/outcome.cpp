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

#include "senseplane/sim/outcome.hpp"

#include <algorithm>

#include "senseplane/random.hpp"

namespace senseplane::sim {

double OutcomeModel::p_correct(decision::Action action, double u, bool unknown) const {
  if (action == decision::Action::kAbstain || action == decision::Action::kRejected) return 0.0;
  const std::size_t a = decision::serving_index(action);
  const double p = unknown ? unknown_base[a] - unknown_slope[a] * u : known_base[a] - known_slope[a] * u;
  return std::clamp(p, 0.0, 1.0);
}

bool OutcomeModel::realized_correct(decision::Action action, double u, bool unknown, std::uint64_t trace_seed,
                                    std::size_t event_index) const {
  Rng rng(derive_seed(derive_seed(trace_seed, "outcome"), event_index));
  return rng.uniform() < p_correct(action, u, unknown);
}

}  // namespace senseplane::sim
