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

#include <optional>
#include <string>
#include <vector>

#include "senseplane/decision/router.hpp"
#include "senseplane/runtime/pipeline.hpp"
#include "senseplane/sim/outcome.hpp"
#include "senseplane/sim/trace.hpp"
#include "senseplane/sim/world.hpp"

namespace senseplane::sim {

enum class ReplayMode { kDeterministic, kPipelined };

std::string_view to_string(ReplayMode mode);
ReplayMode replay_mode_from_string(std::string_view name);

inline constexpr double kColdPhaseMs = 30.0 * 60.0 * 1000.0;

// One row of the per-decision table; every aggregate is computed from these.
struct DecisionRecord {
  std::size_t index = 0;
  std::string event_id;
  std::string stream_id;
  double arrival_ms = 0.0;
  double start_ms = 0.0;
  double finish_ms = 0.0;
  double queue_ms = 0.0;
  bool cold = false;
  decision::Action action = decision::Action::kEdgeOnly;
  std::string rule;
  double u = 0.0;
  bool unknown = false;
  bool duplicate = false;
  bool correct = false;
  runtime::StageBreakdown stages;
  double e2e_ms = 0.0;   // sum of stage components
  double ftt_ms = 0.0;   // queue + first token
  double ttcr_ms = 0.0;  // queue + end to end
  std::size_t tokens_in = 0;
  std::size_t tokens_out = 0;
  std::size_t escalated_tokens = 0;
  std::size_t counterfactual_tokens = 0;  // had this decision escalated
  std::size_t bytes_up = 0;
  std::size_t bytes_down = 0;
  double energy_j = 0.0;
  int retrieval_cache_hit = -1;
  int semantic_cache_hit = -1;
  std::vector<std::string> doc_ids;
  int first_relevant_rank = 0;  // 1-based; 0 when no relevant doc or no retrieval
  std::size_t evidence = 0;
  std::size_t citations = 0;
  std::size_t abstract_citations = 0;
  bool contradiction = false;
  std::size_t redaction_diffs = 0;
  std::string guard;
  std::string quant_level;
  decision::CostVector cost;  // realized, chosen action
  std::uint64_t audit_seq = 0;
  std::string reason;
};

struct CapturedPayload {
  std::size_t index = 0;
  std::string body;
  std::vector<double> raw_values;
};

struct ReplayOptions {
  ReplayMode mode = ReplayMode::kDeterministic;
  std::optional<decision::Action> forced;
  std::optional<runtime::LinkProfile> link;  // overrides trace and config
  std::optional<decision::LossModel> loss_model;
  OutcomeModel outcome;
  bool capture_payloads = false;
  double cold_phase_ms = kColdPhaseMs;
  WorldSpec world;
};

struct ReplayResult {
  std::vector<DecisionRecord> records;
  std::string audit_log;
  std::vector<CapturedPayload> payloads;
  std::size_t semantic_lookups = 0;
  std::size_t semantic_hits = 0;
  std::size_t retrieval_lookups = 0;
  std::size_t retrieval_hits = 0;
};

// Processes events in arrival order on a virtual clock. Deterministic mode
// serves one request at a time end to end; pipelined mode lets the front
// stages of a request overlap the generation of the previous one.
ReplayResult replay(const Trace& trace, const runtime::PipelineConfig& config, const ReplayOptions& options = {});
// Same, with a prebuilt world (tests reuse one across runs).
ReplayResult replay(const Trace& trace, const World& world, const runtime::PipelineConfig& config,
                    const ReplayOptions& options = {});

// Per-action realized outcomes for Stage IV calibration: three forced
// replays on the same trace, joined per event. Events not served by all
// three runs are skipped.
std::vector<decision::RegretSample> collect_regret_samples(const Trace& trace, const World& world,
                                                           const runtime::PipelineConfig& config,
                                                           const ReplayOptions& options = {});

}  // namespace senseplane::sim
