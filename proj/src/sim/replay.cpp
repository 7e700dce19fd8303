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

#include "senseplane/sim/replay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "senseplane/error.hpp"
#include "senseplane/random.hpp"
#include "senseplane/runtime/scheduler.hpp"

namespace senseplane::sim {
namespace {

using decision::Action;

runtime::DecisionInput make_input(const Trace& trace, const TraceEvent& e, const runtime::PipelineConfig& config,
                                  const ReplayOptions& options) {
  runtime::DecisionInput in;
  in.decision_id = e.event_id;
  in.stream_id = e.stream_id;
  in.arrival_ms = e.arrival_ms;
  if (e.codes) {
    codec::CodeSequence seq;
    seq.window_id = e.event_id;
    seq.codes = *e.codes;
    seq.timestamp_ms = e.arrival_ms;
    seq.modality_presence.assign(config.encoder.modalities, true);
    seq.confidence = 1.0;
    seq.site_id = "site-1";
    in.codes = std::move(seq);
  } else {
    codec::RawWindowRecord raw = synthesize_window(config.encoder, trace.spec.seed, e.topic, e.window_seed);
    raw.window_id = e.event_id;
    raw.timestamp_ms = e.arrival_ms;
    in.raw = std::move(raw);
    in.codes_per_window = e.k;
  }
  in.sensory_passes = e.sensory_passes;
  in.language_posterior = e.language_posterior;
  in.note = e.note;
  in.query_text = e.query;
  in.forced = options.forced;
  if (options.link) {
    in.link = *options.link;
  } else if (e.link) {
    in.link = runtime::LinkProfile::by_name(*e.link);
  }
  return in;
}

}  // namespace

std::string_view to_string(ReplayMode mode) {
  return mode == ReplayMode::kDeterministic ? "deterministic" : "pipelined";
}

ReplayMode replay_mode_from_string(std::string_view name) {
  if (name == "deterministic") return ReplayMode::kDeterministic;
  if (name == "pipelined") return ReplayMode::kPipelined;
  fail(ErrorCode::kConfigError, "unknown replay mode: " + std::string(name));
}

ReplayResult replay(const Trace& trace, const runtime::PipelineConfig& config, const ReplayOptions& options) {
  return replay(trace, build_world(trace, config, options.world), config, options);
}

ReplayResult replay(const Trace& trace, const World& world, const runtime::PipelineConfig& config,
                    const ReplayOptions& options) {
  try {
    config.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    fail(ErrorCode::kConfigError, e.what());
  }
  const auto& events = trace.events;
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].arrival_ms < events[i - 1].arrival_ms) {
      fail(ErrorCode::kTraceCorrupt, "trace events are not in arrival order");
    }
  }

  runtime::Pipeline pipeline(config, world.codebook, world.index);
  if (options.loss_model) pipeline.set_loss_model(*options.loss_model);
  runtime::EdfScheduler scheduler(config.scheduler);
  runtime::DownshiftController downshift(config.downshift);
  std::map<std::string, std::size_t> doc_topic;
  for (std::size_t t = 0; t < world.topic_docs.size(); ++t) {
    for (const auto& id : world.topic_docs[t]) doc_topic[id] = t;
  }
  const std::uint64_t draw_root = derive_seed(trace.spec.seed, "draw");
  const bool pipelined = options.mode == ReplayMode::kPipelined;

  ReplayResult result;
  std::vector<std::optional<DecisionRecord>> rows(events.size());
  double front_free = 0.0;
  double llm_free = 0.0;
  std::size_t next = 0;

  const auto base_record = [&](std::size_t idx) {
    const TraceEvent& e = events[idx];
    DecisionRecord r;
    r.index = idx;
    r.event_id = e.event_id;
    r.stream_id = e.stream_id;
    r.arrival_ms = static_cast<double>(e.arrival_ms);
    r.cold = r.arrival_ms < options.cold_phase_ms;
    r.unknown = e.unknown;
    r.duplicate = e.duplicate;
    return r;
  };

  while (next < events.size() || !scheduler.empty()) {
    double now = front_free;
    if (scheduler.empty()) now = std::max(now, static_cast<double>(events[next].arrival_ms));
    while (next < events.size() && static_cast<double>(events[next].arrival_ms) <= now) {
      scheduler.submit(runtime::Request::make(next, static_cast<double>(events[next].arrival_ms),
                                              pipeline.predicted_min_service_ms(), config.slo_ms));
      ++next;
    }
    pipeline.set_quant_level(downshift.tick(scheduler.depth()));
    runtime::Batch batch = scheduler.next_batch(now);

    for (const auto& rej : batch.rejected) {
      const std::size_t idx = rej.request.id;
      runtime::DecisionInput in = make_input(trace, events[idx], config, options);
      in.decided_ms = static_cast<std::int64_t>(std::floor(now));
      const auto out = pipeline.reject(in, rej.reason);
      DecisionRecord r = base_record(idx);
      r.action = Action::kRejected;
      r.rule = out.rule;
      r.reason = out.reason;
      r.u = events[idx].target_u;
      r.start_ms = r.finish_ms = now;
      r.queue_ms = now - r.arrival_ms;
      r.ttcr_ms = r.ftt_ms = r.queue_ms;
      r.audit_seq = out.audit_seq;
      r.guard = "pass";
      r.quant_level = std::string(decision::to_string(downshift.level()));
      rows[idx] = std::move(r);
    }

    const double occupancy = static_cast<double>(batch.requests.size());
    double clock = now;
    for (const auto& req : batch.requests) {
      const std::size_t idx = req.id;
      const TraceEvent& e = events[idx];
      runtime::DecisionInput in = make_input(trace, e, config, options);
      in.batch_occupancy = occupancy;
      in.concurrent_sessions = static_cast<double>(scheduler.depth()) + occupancy;
      const double start = std::max(clock, static_cast<double>(e.arrival_ms));
      in.decided_ms = static_cast<std::int64_t>(std::floor(start));
      const runtime::DecisionOutcome out = pipeline.decide(in, derive_seed(draw_root, idx));

      const auto& st = out.stages;
      const double front = st.encode_ms + st.retrieval_ms + st.routing_ms;
      const double back = out.e2e_ms - front;
      double finish = 0.0;
      double queue = start - static_cast<double>(e.arrival_ms);
      if (pipelined) {
        const double front_end = start + front;
        const double llm_start = std::max(front_end, llm_free);
        finish = llm_start + back;
        queue += llm_start - front_end;
        front_free = front_end;
        llm_free = finish;
        clock = front_end;
      } else {
        finish = start + out.e2e_ms;
        front_free = llm_free = finish;
        clock = finish;
      }

      DecisionRecord r = base_record(idx);
      r.start_ms = start;
      r.finish_ms = finish;
      r.queue_ms = queue;
      r.action = out.action;
      r.rule = out.rule;
      r.u = out.u.fused;
      r.correct = options.outcome.realized_correct(out.action, out.u.fused, e.unknown, trace.spec.seed, idx);
      r.stages = out.stages;
      r.e2e_ms = out.e2e_ms;
      r.ftt_ms = queue + out.ftt_ms;
      r.ttcr_ms = queue + out.e2e_ms;
      r.tokens_in = out.tokens_in;
      r.tokens_out = out.tokens_out;
      r.escalated_tokens = out.action == Action::kEscalate ? out.tokens_in + out.tokens_out : 0;
      r.counterfactual_tokens = out.escalate_tokens;
      r.bytes_up = out.bytes_up;
      r.bytes_down = out.bytes_down;
      r.energy_j = out.energy_j;
      r.retrieval_cache_hit = out.retrieval_cache_hit;
      r.semantic_cache_hit = out.semantic_cache_hit;
      r.doc_ids = out.doc_ids;
      if (!e.unknown && out.retrieval_cache_hit >= 0) {
        for (std::size_t i = 0; i < out.doc_ids.size(); ++i) {
          const auto it = doc_topic.find(out.doc_ids[i]);
          if (it != doc_topic.end() && it->second == e.topic) {
            r.first_relevant_rank = static_cast<int>(i + 1);
            break;
          }
        }
      }
      r.evidence = out.evidence.size();
      r.citations = out.citations;
      r.abstract_citations = out.abstract_citations;
      r.contradiction = out.contradiction;
      r.redaction_diffs = out.redaction_diffs;
      r.guard = std::string(secure::to_string(out.guard));
      r.quant_level = std::string(decision::to_string(out.quant_level));
      r.cost = out.cost;
      r.audit_seq = out.audit_seq;
      r.reason = out.reason;

      if (out.retrieval_cache_hit >= 0) {
        ++result.retrieval_lookups;
        if (out.retrieval_cache_hit == 1) ++result.retrieval_hits;
      }
      if (out.semantic_cache_hit >= 0) {
        ++result.semantic_lookups;
        if (out.semantic_cache_hit == 1) ++result.semantic_hits;
      }
      if (options.capture_payloads && !out.escalated_payload.empty()) {
        CapturedPayload p;
        p.index = idx;
        p.body = out.escalated_payload;
        if (in.raw) p.raw_values = pipeline.encode(*in.raw, in.codes_per_window).raw_values;
        result.payloads.push_back(std::move(p));
      }
      rows[idx] = std::move(r);
    }
  }

  result.records.reserve(rows.size());
  for (auto& r : rows) {
    if (!r) fail(ErrorCode::kInvalidArgument, "replay lost an event");
    result.records.push_back(std::move(*r));
  }
  result.audit_log = pipeline.audit().contents();
  return result;
}

std::vector<decision::RegretSample> collect_regret_samples(const Trace& trace, const World& world,
                                                           const runtime::PipelineConfig& config,
                                                           const ReplayOptions& options) {
  std::array<ReplayResult, 3> runs;
  for (std::size_t a = 0; a < 3; ++a) {
    ReplayOptions o = options;
    o.forced = decision::kServingActions[a];
    o.capture_payloads = false;
    runs[a] = replay(trace, world, config, o);
  }
  std::vector<decision::RegretSample> samples;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    bool served = true;
    for (std::size_t a = 0; a < 3; ++a) {
      served = served && runs[a].records[i].action == decision::kServingActions[a];
    }
    if (!served) continue;
    decision::RegretSample s;
    s.u = runs[0].records[i].u;
    const bool unknown = trace.events[i].unknown;
    for (std::size_t a = 0; a < 3; ++a) {
      s.loss[a] = options.outcome.expected_loss(decision::kServingActions[a], s.u, unknown);
      s.cost[a] = runs[a].records[i].cost;
    }
    s.chosen = decision::threshold_action(s.u, config.router.theta_edge, config.router.theta_esc);
    const auto& rec = runs[decision::serving_index(s.chosen)].records[i];
    s.slo_hit = rec.ttcr_ms <= config.slo_ms;
    s.correct = rec.correct;
    samples.push_back(s);
  }
  return samples;
}

}  // namespace senseplane::sim
