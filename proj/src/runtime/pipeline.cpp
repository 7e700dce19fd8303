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

#include "senseplane/runtime/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "senseplane/digest.hpp"
#include "senseplane/error.hpp"
#include "senseplane/random.hpp"
#include "senseplane/runtime/energy.hpp"

namespace senseplane::runtime {
namespace {

using decision::Action;

constexpr double kRetrievalCacheHitMs = 1.0;
constexpr std::size_t kSalientVectors = 2;
constexpr std::size_t kSalientDims = 4;
constexpr double kEvidenceBytesEstimate = 160.0;

std::size_t count_citations(const std::string& text) {
  std::size_t n = 0;
  for (std::size_t pos = text.find("[doc:"); pos != std::string::npos; pos = text.find("[doc:", pos + 1)) ++n;
  return n;
}

std::vector<std::string> entity_aliases(const secure::RedactionReport& report) {
  std::vector<std::string> out;
  for (const auto& d : report.diffs) out.push_back(d.replacement);
  return out;
}

std::string template_answer(const codec::PromptSketch& sketch) {
  std::string text = "Template notice: local model parked, summary deferred.";
  if (!sketch.doc_ids.empty()) {
    text += " Evidence:";
    for (const auto& id : sketch.doc_ids) text += " [doc:" + id + "]";
  }
  return text;
}

}  // namespace

CodeEmbedder::CodeEmbedder(std::size_t codes, std::size_t dim, std::uint64_t seed)
    : codes_(codes), dim_(dim), table_(codes * dim) {
  Rng rng(derive_seed(seed, "code-embedding"));
  for (double& v : table_) v = rng.normal();
}

std::vector<float> CodeEmbedder::embed(std::span<const std::uint32_t> codes) const {
  std::vector<double> acc(dim_, 0.0);
  for (const auto c : codes) {
    if (c >= codes_) fail(ErrorCode::kIndexOutOfRange, "code outside embedding table");
    for (std::size_t i = 0; i < dim_; ++i) acc[i] += table_[c * dim_ + i];
  }
  double norm = 0.0;
  for (const double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<float> out(dim_, 0.0f);
  if (norm == 0.0) {
    out[0] = 1.0f;
    return out;
  }
  for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<float>(acc[i] / norm);
  // Re-normalize in float so the stored vector is unit norm at f32 precision.
  double fnorm = 0.0;
  for (const float v : out) fnorm += static_cast<double>(v) * v;
  fnorm = std::sqrt(fnorm);
  for (float& v : out) v = static_cast<float>(v / fnorm);
  return out;
}

double StageBreakdown::largest() const {
  return std::max({encode_ms, retrieval_ms, routing_ms, prefill_ms, decode_ms, post_ms, network_ms,
                   cache_ms});
}

void PipelineConfig::validate() const {
  retrieval.validate();
  router.validate();
  link.validate();
  if (retrieve_k == 0 || retrieve_k > retrieval.k_max) {
    fail(ErrorCode::kConfigError, "retrieve_k must be within 1..k_max");
  }
  if (codes_per_window == 0 || codes_per_window > codec::kMaxCodes ||
      codes_per_window > encoder.latent_frames) {
    fail(ErrorCode::kConfigError, "codes_per_window must be within 1..latent_frames");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) fail(ErrorCode::kConfigError, "eta outside [0,1]");
  if (tokens_out[0] > kEdgeTokenCap || tokens_out[1] > kEdgeTokenCap || tokens_out[2] > kCloudTokenCap) {
    fail(ErrorCode::kConfigError, "configured output tokens exceed the backend caps");
  }
  for (const double w : {weights.alpha, weights.beta, weights.gamma, weights.delta}) {
    if (!(w >= 0.0)) fail(ErrorCode::kConfigError, "cost weights must be non-negative");
  }
  if (!(slo_ms > 0.0)) fail(ErrorCode::kConfigError, "slo_ms must be positive");
}

Pipeline::Pipeline(PipelineConfig config, codec::Codebook codebook,
                   std::shared_ptr<const retrieval::HybridIndex> index)
    : config_(std::move(config)),
      codebook_(std::move(codebook)),
      encoder_(config_.encoder),
      index_(std::move(index)),
      embedder_(codebook_.size(), config_.retrieval.embedding_dim, config_.seed),
      retrieval_cache_(config_.retrieval_cache_capacity),
      redactor_(config_.redaction),
      scanner_(redactor_),
      guard_(config_.guard),
      predictor_(config_.predictor),
      semantic_cache_(config_.semantic_cache),
      battery_j_(config_.battery_j) {
  config_.validate();
  if (!index_) fail(ErrorCode::kConfigError, "pipeline needs a retrieval index");
  if (codebook_.dim() != config_.encoder.latent_dim) {
    fail(ErrorCode::kDimensionMismatch, "codebook dimension differs from encoder latent size");
  }
}

void Pipeline::set_router(decision::RouterConfig router) {
  router.validate();
  config_.router = router;
}

Pipeline::Encoded Pipeline::encode(const codec::RawWindowRecord& raw,
                                   std::size_t codes_per_window) const {
  const codec::FeatureWindow window = encoder_.encode(raw);
  const std::size_t k = codes_per_window == 0 ? config_.codes_per_window : codes_per_window;
  if (k > window.features.rows()) fail(ErrorCode::kInvalidArgument, "more codes than latent frames");
  const codec::QuantizeResult q = codec::quantize(window, codebook_, k);
  Encoded out;
  out.codes = q.sequence;
  // The segments quantized worst carry the most information the codes miss.
  std::vector<std::size_t> order(q.distances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return q.distances[a] > q.distances[b]; });
  for (std::size_t i = 0; i < std::min(kSalientVectors, order.size()); ++i) {
    out.salient.push_back(codec::compress_salient(q.pooled[order[i]], kSalientDims));
  }
  out.raw_values = raw.values;
  out.raw_values.insert(out.raw_values.end(), window.features.data().begin(),
                        window.features.data().end());
  for (const auto& p : q.pooled) out.raw_values.insert(out.raw_values.end(), p.begin(), p.end());
  return out;
}

std::vector<retrieval::ScoredSnippet> Pipeline::retrieve(const codec::CodeSequence& codes,
                                                         const std::string& query_text,
                                                         bool* cache_hit) {
  const std::string key = codec::code_key(codes) + "|" + query_text;
  if (auto ids = retrieval_cache_.get(key)) {
    if (cache_hit != nullptr) *cache_hit = true;
    std::vector<retrieval::ScoredSnippet> out;
    for (const auto& id : *ids) {
      if (auto s = index_->get(id)) {
        retrieval::ScoredSnippet scored;
        scored.snippet = std::move(*s);
        out.push_back(std::move(scored));
      }
    }
    return out;
  }
  if (cache_hit != nullptr) *cache_hit = false;
  const auto query = retrieval::make_query(embedder_.embed(codes.codes), query_text);
  const auto oracle = index_->lexical_oracle();
  auto result = index_->retrieve(query, config_.retrieve_k, oracle);
  std::vector<std::string> ids;
  for (const auto& s : result) ids.push_back(s.snippet.doc_id);
  retrieval_cache_.put(key, std::move(ids));
  return result;
}

double Pipeline::predicted_min_service_ms() const {
  const auto& t = config_.stages;
  double total = 0.0;
  for (std::size_t s = 0; s < kStageCount; ++s) {
    total += t.at(Action::kEdgeOnly, static_cast<Stage>(s)).median;
  }
  return total;
}

DecisionOutcome Pipeline::reject(const DecisionInput& input, const std::string& reason) {
  DecisionOutcome out;
  out.decision_id = input.decision_id;
  out.action = Action::kRejected;
  out.rule = "admission";
  out.reason = reason;
  if (input.codes) out.codes = *input.codes;
  secure::AuditRecord rec;
  rec.timestamp_ms = input.decided_ms >= 0 ? input.decided_ms : input.arrival_ms;
  rec.stream_id = input.stream_id;
  rec.decision_id = input.decision_id;
  rec.action = Action::kRejected;
  rec.guard_verdict = secure::GuardVerdict::kPass;
  rec.prompt_checksum = digest128("").hex();
  out.audit_seq = audit_.append(std::move(rec));
  return out;
}

secure::DegradeResult Pipeline::degrade(std::vector<retrieval::ScoredSnippet> snippets) {
  // Index documents never change, so each one is degraded once.
  secure::DegradeResult result;
  for (auto& s : snippets) {
    auto it = degraded_.find(s.snippet.doc_id);
    if (it == degraded_.end()) {
      auto one = secure::degrade_evidence({s}, redactor_);
      it = degraded_.emplace(s.snippet.doc_id, std::make_pair(std::move(one.snippets.front().snippet),
                                                              one.flagged > 0)).first;
    }
    s.snippet = it->second.first;
    if (it->second.second) ++result.flagged;
  }
  result.snippets = std::move(snippets);
  return result;
}

DecisionOutcome Pipeline::decide(const DecisionInput& input, std::uint64_t draw_seed) {
  Rng rng(draw_seed);
  const StageScores z = StageScores::draw(rng, config_.stages.correlation);
  const LinkProfile link = input.link.value_or(config_.link);
  const LinkDraw link_draw = draw_link(link, z);
  const auto zs = [&](Stage s) { return z.z[static_cast<std::size_t>(s)]; };

  DecisionOutcome out;
  out.decision_id = input.decision_id;
  out.quant_level = quant_level_;

  Encoded enc;
  if (input.raw) {
    enc = encode(*input.raw, input.codes_per_window);
  } else if (input.codes) {
    enc.codes = *input.codes;
  } else {
    fail(ErrorCode::kInvalidArgument, "decision needs a raw window or a code sequence");
  }
  out.codes = enc.codes;

  codec::SketchContext context;
  context.note = input.note;
  const codec::PromptSketch base = codec::serialize_sketch(enc.codes, enc.salient, {}, input.task, context);
  const auto [base_redacted, base_report] = redactor_.redact(base);
  const secure::GuardVerdict prompt_guard = guard_.check(base_redacted.body);

  if (input.sensory_passes.empty()) fail(ErrorCode::kInvalidArgument, "decision needs sensory posteriors");
  out.u = decision::fuse_uncertainty(input.sensory_passes, input.language_posterior, config_.eta);

  std::array<decision::CostFeatures, 3> features{};
  for (std::size_t a = 0; a < 3; ++a) {
    auto& f = features[a];
    f.quant_level = static_cast<double>(quant_level_);
    f.batch_occupancy = input.batch_occupancy;
    f.code_length = static_cast<double>(enc.codes.codes.size());
    f.retrieved_k = a == 0 ? 0.0 : static_cast<double>(config_.retrieve_k);
    f.up_mbps = link.up_mbps;
    f.down_mbps = link.down_mbps;
    f.rtt_ms = link.rtt_ms;
    f.concurrent_sessions = input.concurrent_sessions;
    f.prompt_tokens = static_cast<double>(base_redacted.token_estimate) +
                      f.retrieved_k * kEvidenceBytesEstimate / 4.0;
    f.payload_bytes = a == 2 ? static_cast<double>(base_redacted.body.size()) +
                                   f.retrieved_k * kEvidenceBytesEstimate
                             : 0.0;
    const double risk = a == 2 ? decision::rule_risk(base_redacted, base_report) : 0.0;
    out.costs[a] = decision::predict_cost(decision::kServingActions[a], f, predictor_, config_.weights, risk);
  }

  decision::RuntimeHealth health;
  health.energy_j = battery_j_;
  health.link_up = link.up;
  health.guard = prompt_guard;
  decision::RoutingDecision routed =
      decision::route(out.u, out.costs, loss_model_, config_.router, health);
  if (input.forced) {
    routed.action = *input.forced;
    routed.templated = false;
    routed.rule = "forced";
  }
  out.action = routed.action;
  out.rule = routed.rule;
  out.templated = routed.templated;

  const Action stage_row = out.action == Action::kAbstain ? Action::kEdgeOnly : out.action;
  out.stages.encode_ms = config_.stages.at(stage_row, Stage::kEncode).at(zs(Stage::kEncode));
  out.stages.routing_ms = config_.stages.at(stage_row, Stage::kRouting).at(zs(Stage::kRouting));

  std::vector<retrieval::ScoredSnippet> evidence;
  const bool retrieves = out.action == Action::kEdgeRag || out.action == Action::kEscalate;
  if (retrieves) {
    bool hit = false;
    evidence = retrieve(enc.codes, input.query_text, &hit);
    out.retrieval_cache_hit = hit ? 1 : 0;
    out.stages.retrieval_ms =
        hit ? kRetrievalCacheHitMs
            : config_.stages.at(out.action, Stage::kRetrieval).at(zs(Stage::kRetrieval));
  }
  const secure::DegradeResult degraded = degrade(std::move(evidence));
  for (const auto& s : degraded.snippets) out.evidence.push_back(s.snippet);
  for (const auto& s : out.evidence) out.doc_ids.push_back(s.doc_id);
  {
    const auto oracle = index_->lexical_oracle();
    for (std::size_t i = 0; i < out.evidence.size() && !out.contradiction; ++i) {
      for (std::size_t j = i + 1; j < out.evidence.size(); ++j) {
        if (oracle(out.evidence[i], out.evidence[j]) < 0.0) {
          out.contradiction = true;
          break;
        }
      }
    }
  }

  const codec::PromptSketch sketch =
      codec::serialize_sketch(enc.codes, enc.salient, degraded.snippets, input.task, context);
  auto [redacted, report] = redactor_.redact(sketch);
  out.redaction_diffs = report.diffs.size();
  out.surviving_matches = report.surviving_matches;
  out.prompt_checksum = digest128(redacted.body).hex();
  out.guard = prompt_guard;

  // Token count had this decision escalated, for the savings counterfactual.
  if (out.action == Action::kEscalate || out.action == Action::kEdgeRag) {
    out.escalate_tokens = redacted.token_estimate + config_.tokens_out[2];
  } else {
    const auto query = retrieval::make_query(embedder_.embed(enc.codes.codes), input.query_text);
    const auto oracle = index_->lexical_oracle();
    auto cf_evidence = degrade(index_->retrieve(query, config_.retrieve_k, oracle));
    const auto cf_sketch =
        codec::serialize_sketch(enc.codes, enc.salient, cf_evidence.snippets, input.task, context);
    out.escalate_tokens = redactor_.redact(cf_sketch).first.token_estimate + config_.tokens_out[2];
  }

  std::vector<StageEvent> events = {{"encode", config_.power.encode_w, out.stages.encode_ms},
                                    {"retrieval", config_.power.retrieval_w, out.stages.retrieval_ms},
                                    {"routing", config_.power.routing_w, out.stages.routing_ms}};
  const bool serves = out.action == Action::kEdgeOnly || out.action == Action::kEdgeRag ||
                      out.action == Action::kEscalate;
  double gen_ftt = 0.0;
  Digest128 cache_key;
  if (serves) {
    out.tokens_in = redacted.token_estimate;
    if (config_.semantic_cache_enabled) {
      cache_key = SemanticCache::make_key(enc.codes.codes, out.doc_ids, entity_aliases(report));
      if (auto hit = semantic_cache_.lookup(cache_key, input.arrival_ms)) {
        out.semantic_cache_hit = 1;
        out.text = hit->text;
        out.stages.cache_ms = config_.semantic_cache.hit_cost_ms;
        gen_ftt = out.stages.cache_ms;
        events.push_back({"cache", config_.power.routing_w, out.stages.cache_ms});
        out.tokens_in = 0;
      } else {
        out.semantic_cache_hit = 0;
      }
    }
    if (out.semantic_cache_hit != 1) {
      const std::size_t a = decision::serving_index(out.action);
      const std::size_t tokens = config_.tokens_out[a];
      Generation gen;
      bool generated = true;
      if (out.action == Action::kEscalate) {
        BackendModel cloud = BackendModel::cloud(config_.stages);
        cloud.reference_tokens_out = static_cast<double>(config_.tokens_out[2]);
        cloud.idle_power_w = config_.power.idle_w;
        CloudOptions options;
        options.header_bytes = config_.header_bytes;
        options.scanner = &scanner_;
        options.raw_values = enc.raw_values;
        try {
          gen = generate_cloud(redacted, link, link_draw, cloud, tokens, zs(Stage::kPrefill),
                               zs(Stage::kDecode), options);
          out.escalated_payload = redacted.body;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kLinkDown && e.code() != ErrorCode::kRedactionNotApplied) throw;
          out.reason = e.what();
          out.rule = e.code() == ErrorCode::kLinkDown ? "link-down" : "egress-blocked";
          out.action = e.code() == ErrorCode::kLinkDown ? Action::kEdgeRag : Action::kAbstain;
          generated = false;
        }
      } else if (out.templated) {
        gen.text = template_answer(redacted);
        generated = true;
      } else {
        BackendModel edge = BackendModel::edge(config_.stages, out.action);
        edge.reference_tokens_out = static_cast<double>(tokens);
        edge.idle_power_w = config_.power.idle_w;
        gen = generate_local(redacted, edge, quant_level_, tokens, zs(Stage::kPrefill), zs(Stage::kDecode));
      }
      if (!generated && out.action == Action::kEdgeRag) {
        BackendModel edge = BackendModel::edge(config_.stages, Action::kEdgeRag);
        edge.reference_tokens_out = static_cast<double>(config_.tokens_out[1]);
        edge.idle_power_w = config_.power.idle_w;
        gen = generate_local(redacted, edge, quant_level_, config_.tokens_out[1], zs(Stage::kPrefill),
                             zs(Stage::kDecode));
        generated = true;
      }
      if (generated) {
        out.text = gen.text;
        out.tokens_out = gen.tokens_out;
        out.stages.prefill_ms = gen.prefill_ms;
        out.stages.decode_ms = gen.decode_ms;
        out.stages.network_ms = gen.serialization_ms + gen.up_ms + gen.rtt_ms + gen.down_ms;
        out.bytes_up = gen.bytes_up;
        out.bytes_down = gen.bytes_down;
        gen_ftt = gen.ftt_ms;
        events.insert(events.end(), gen.events.begin(), gen.events.end());
      } else {
        out.tokens_in = 0;
      }
    }
  }

  if (out.action != Action::kAbstain) {
    out.stages.post_ms = config_.stages.at(stage_row, Stage::kPost).at(zs(Stage::kPost));
    events.push_back({"post", config_.power.post_w, out.stages.post_ms});
    const secure::GuardVerdict output_guard = guard_.check(out.text);
    if (output_guard == secure::GuardVerdict::kAbstain) {
      out.action = Action::kAbstain;
      out.rule = "output-guard";
      out.text.clear();
    }
    if (output_guard != secure::GuardVerdict::kPass) out.guard = output_guard;
  } else {
    out.text.clear();
  }

  out.citations = count_citations(out.text);
  for (const auto& s : out.evidence) {
    if (s.abstracted && out.text.find("[doc:" + s.doc_id + "]") != std::string::npos) ++out.abstract_citations;
  }
  out.ftt_ms = out.stages.encode_ms + out.stages.retrieval_ms + out.stages.routing_ms + gen_ftt;
  out.e2e_ms = out.stages.sum();

  const EnergyReading energy = energy_meter(events, config_.power.idle_w, out.tokens_out);
  out.energy_j = energy.joules;
  out.energy_clamped = energy.clamped;
  battery_j_ -= out.energy_j;

  const std::size_t chosen = decision::serving_index(out.action == Action::kAbstain ? Action::kEdgeOnly : out.action);
  out.cost = out.costs[chosen];
  out.cost.lat_ms = out.e2e_ms;
  out.cost.energy_j = out.energy_j;
  out.cost.tokens = static_cast<double>(out.tokens_in + out.tokens_out);
  out.cost.from_priors = false;
  out.cost.total = out.cost.recompute_total();
  if (out.semantic_cache_hit != 1 && out.tokens_out > 0) {
    predictor_.observe(out.action, features[chosen], {out.e2e_ms, out.energy_j, out.cost.tokens, false});
  }

  if (out.semantic_cache_hit == 0 && !out.text.empty() && config_.semantic_cache_enabled) {
    SemanticCacheEntry entry;
    entry.key = cache_key;
    entry.text = out.text;
    entry.action = out.action;
    entry.prompt_checksum = out.prompt_checksum;
    entry.created_ms = input.arrival_ms;
    semantic_cache_.store(std::move(entry));
  }

  secure::AuditRecord rec;
  rec.timestamp_ms = input.decided_ms >= 0 ? input.decided_ms : input.arrival_ms;
  rec.stream_id = input.stream_id;
  rec.decision_id = input.decision_id;
  rec.action = out.action;
  rec.u = out.u.fused;
  rec.cost = out.cost;
  rec.redaction_diff_count = out.redaction_diffs;
  rec.doc_ids = out.doc_ids;
  rec.guard_verdict = out.guard;
  rec.prompt_checksum = out.prompt_checksum;
  out.audit_seq = audit_.append(std::move(rec));
  return out;
}

}  // namespace senseplane::runtime
