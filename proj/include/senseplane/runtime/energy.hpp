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

#include <span>
#include <string>
#include <vector>

namespace senseplane::runtime {

struct StageEvent {
  std::string stage;
  double power_w = 0.0;
  double duration_ms = 0.0;
};

struct EnergyReading {
  double joules = 0.0;
  double joules_per_100_tokens = 0.0;  // 0 when no tokens were produced
  // Set when the integral fell below zero and was clamped.
  bool clamped = false;
};

// Integrates power over the stage events minus the idle baseline over the
// same time.
EnergyReading energy_meter(std::span<const StageEvent> events, double idle_w,
                           std::size_t tokens_out = 0);

}  // namespace senseplane::runtime
