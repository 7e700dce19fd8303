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
#include <span>
#include <string>
#include <vector>

#include "senseplane/codec/sketch.hpp"
#include "senseplane/decision/types.hpp"
#include "senseplane/runtime/energy.hpp"
#include "senseplane/runtime/latency.hpp"
#include "senseplane/secure/scanner.hpp"

namespace senseplane::runtime {

inline constexpr std::size_t kEdgeTokenCap = 200;
inline constexpr std::size_t kCloudTokenCap = 350;

// Generation stub. Prefill and decode are lognormal at fp16 for the
// reference output length; decode scales linearly with tokens_out.
struct BackendModel {
  std::string name = "edge";
  LognormalStage prefill{80, 140};
  LognormalStage decode{160, 240};
  double reference_tokens_out = 96.0;
  double prefill_ms_per_input_token = 0.0;
  std::array<double, 3> quant_multiplier = {1.0, 0.85, 0.7};
  double prefill_power_w = 9.0;
  double decode_power_w = 8.0;
  double idle_power_w = 1.5;
  std::size_t token_cap = kEdgeTokenCap;
  std::size_t max_input_tokens = 768;

  static BackendModel edge(const StageTable& table, decision::Action action);
  static BackendModel cloud(const StageTable& table);
};

struct Generation {
  std::string text;
  std::size_t tokens_out = 0;
  double prefill_ms = 0.0;
  double decode_ms = 0.0;
  // Relative to the start of the call.
  double ftt_ms = 0.0;
  double ttcr_ms = 0.0;
  double energy_j = 0.0;
  std::vector<StageEvent> events;
  // Cloud only.
  double serialization_ms = 0.0;
  double up_ms = 0.0;
  double rtt_ms = 0.0;
  double down_ms = 0.0;
  std::size_t bytes_up = 0;
  std::size_t bytes_down = 0;
};

// Deterministic answer text; cites every evidence id as [doc:<id>].
std::string compose_answer(const codec::PromptSketch& sketch, decision::Action action);

Generation generate_local(const codec::PromptSketch& sketch, const BackendModel& backend,
                          decision::QuantLevel level, std::size_t tokens_out, double z_prefill,
                          double z_decode);

struct CloudOptions {
  std::size_t header_bytes = 256;
  double serialization_ms_per_kb = 0.02;
  double radio_power_w = 2.5;
  // When set, the payload must scan clean against these raw values.
  const secure::PayloadScanner* scanner = nullptr;
  std::span<const double> raw_values;
};

// latency = serialization + up-transfer + RTT + remote prefill + remote
// decode + down-transfer.
Generation generate_cloud(const codec::PromptSketch& sketch, const LinkProfile& link,
                          const LinkDraw& draw, const BackendModel& backend,
                          std::size_t tokens_out, double z_prefill, double z_decode,
                          const CloudOptions& options = {});

}  // namespace senseplane::runtime
