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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "senseplane/codec/quantizer.hpp"
#include "senseplane/retrieval/snippet.hpp"

namespace senseplane::codec {

enum class TaskKind { kExplain, kAdvise, kAbstain };

std::string_view to_string(TaskKind task);
TaskKind task_from_string(std::string_view name);

inline constexpr std::size_t kMaxSalientVectors = 4;

// Compact prompt body with four ordered blocks:
//   [Context] [Semantics] [Evidence] [Task]
struct PromptSketch {
  std::string body;
  std::size_t token_estimate = 0;
  std::vector<std::string> doc_ids;
  TaskKind task = TaskKind::kExplain;
  // Set only by the redaction path; cloud backends refuse unredacted bodies.
  bool redacted = false;
  // Requests to attach raw waveforms. Never set by the default pipeline.
  std::uint32_t raw_waveform_requests = 0;
  std::size_t evidence_bytes = 0;
};

struct SketchContext {
  std::string device_health = "ok";
  // Free-text site context (room, last seen person, ...). May hold PII and
  // is expected to pass through redaction before leaving the device.
  std::string note;
};

struct SketchLimits {
  std::size_t max_bytes = 4096;
  int salient_precision = 3;
};

// Reduces a latent vector to `dims` values by equal-width mean pooling.
std::vector<double> compress_salient(std::span<const double> vector, std::size_t dims);

// Deterministic, injective serialization. Token estimate is ceil(bytes / 4),
// excluding the Evidence block when it is empty.
PromptSketch serialize_sketch(const CodeSequence& sequence,
                              std::span<const std::vector<double>> salient,
                              std::span<const retrieval::ScoredSnippet> evidence, TaskKind task,
                              const SketchContext& context = {}, const SketchLimits& limits = {});

std::size_t estimate_tokens(std::size_t bytes);

// Percent-escapes the characters that delimit sketch fields.
std::string escape_field(std::string_view text, std::string_view reserved = "%\n|;[]");

}  // namespace senseplane::codec
