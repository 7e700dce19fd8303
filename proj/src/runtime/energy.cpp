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

#include "senseplane/runtime/energy.hpp"

#include <cmath>

#include "senseplane/error.hpp"

namespace senseplane::runtime {

EnergyReading energy_meter(std::span<const StageEvent> events, double idle_w, std::size_t tokens_out) {
  double joules = 0.0;
  for (const StageEvent& e : events) {
    if (!std::isfinite(e.power_w) || !std::isfinite(e.duration_ms) || e.duration_ms < 0.0) {
      fail(ErrorCode::kInvalidArgument, "stage event '" + e.stage + "' has invalid power or duration");
    }
    joules += (e.power_w - idle_w) * e.duration_ms / 1000.0;
  }
  EnergyReading r;
  if (joules < 0.0) {
    r.clamped = true;
    joules = 0.0;
  }
  r.joules = joules;
  if (tokens_out > 0) r.joules_per_100_tokens = joules * 100.0 / static_cast<double>(tokens_out);
  return r;
}

}  // namespace senseplane::runtime
