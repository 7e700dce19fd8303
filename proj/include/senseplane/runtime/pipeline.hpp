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
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "senseplane/codec/codebook.hpp"
#include "senseplane/codec/encoder.hpp"
#include "senseplane/codec/quantizer.hpp"
#include "senseplane/codec/sketch.hpp"
#include "senseplane/decision/cost.hpp"
#include "senseplane/decision/router.hpp"
#include "senseplane/retrieval/hybrid_index.hpp"
#include "senseplane/retrieval/retrieval_cache.hpp"
#include "senseplane/runtime/backend.hpp"
#include "senseplane/runtime/latency.hpp"
#include "senseplane/runtime/scheduler.hpp"
#include "senseplane/runtime/semantic_cache.hpp"
#include "senseplane/secure/audit.hpp"
#include "senseplane/secure/guard.hpp"
#include "senseplane/secure/redactor.hpp"
#include "senseplane/secure/scanner.hpp"

namespace senseplane::runtime {

// Maps a code sequence to a unit query vector: the normalized sum of fixed
// random per-code embeddings.
class CodeEmbedder {
 public:
  CodeEmbedder(std::size_t codes, std::size_t dim, std::uint64_t seed);

  std::vector<float> embed(std::span<const std::uint32_t> codes) const;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t codes_;
  std::size_t dim_;
  std::vector<double> table_;
};

struct FrontStagePower {
  double encode_w = 4.0;
  double retrieval_w = 3.5;
  double routing_w = 3.0;
  double post_w = 3.0;
  double idle_w = 1.5;
};

struct PipelineConfig {
  codec::EncoderConfig encoder;
  std::size_t codes_per_window = 16;
  retrieval::HybridIndexConfig retrieval;
  std::size_t retrieve_k = 3;
  std::size_t retrieval_cache_capacity = 256;
  secure::RedactionPolicy redaction = secure::RedactionPolicy::defaults();
  secure::GuardRules guard = secure::GuardRules::defaults();
  decision::CostWeights weights;
  decision::CostPredictorConfig predictor;
  decision::RouterConfig router;
  double eta = 0.5;
  StageTable stages = StageTable::reference();
  LinkProfile link = LinkProfile::moderate();
  std::size_t header_bytes = 256;
  // Output tokens per serving action; also the backends' reference length.
  std::array<std::size_t, 3> tokens_out = {96, 112, 240};
  SchedulerConfig scheduler;
  DownshiftConfig downshift;
  SemanticCacheConfig semantic_cache;
  bool semantic_cache_enabled = true;
  FrontStagePower power;
  double battery_j = std::numeric_limits<double>::infinity();
  double slo_ms = kDefaultSloMs;
  std::uint64_t seed = 7;

  void validate() const;
};

struct DecisionInput {
  std::string decision_id;
  std::string stream_id = "stream-0";
  std::int64_t arrival_ms = 0;
  // Audit timestamp; negative means the arrival time.
  std::int64_t decided_ms = -1;
  // Either a raw window to encode or a ready code sequence.
  std::optional<codec::RawWindowRecord> raw;
  std::optional<codec::CodeSequence> codes;
  // Codes per window for raw input; 0 uses the configured count.
  std::size_t codes_per_window = 0;
  std::vector<std::vector<double>> sensory_passes;
  std::vector<double> language_posterior;
  std::string note;
  std::string query_text;
  codec::TaskKind task = codec::TaskKind::kExplain;
  std::optional<decision::Action> forced;
  std::optional<LinkProfile> link;
  double batch_occupancy = 1.0;
  double concurrent_sessions = 1.0;
};

struct StageBreakdown {
  double encode_ms = 0.0;
  double retrieval_ms = 0.0;
  double routing_ms = 0.0;
  double prefill_ms = 0.0;
  double decode_ms = 0.0;
  double post_ms = 0.0;
  double network_ms = 0.0;  // serialization, transfers and RTT
  double cache_ms = 0.0;

  double sum() const {
    return encode_ms + retrieval_ms + routing_ms + prefill_ms + decode_ms + post_ms + network_ms +
           cache_ms;
  }
  double largest() const;
};

struct DecisionOutcome {
  std::string decision_id;
  decision::Action action = decision::Action::kEdgeOnly;
  std::string rule;
  bool templated = false;
  decision::UncertaintyEstimate u;
  std::array<decision::CostVector, 3> costs{};
  decision::CostVector cost;  // chosen action, realized
  codec::CodeSequence codes;
  std::vector<std::string> doc_ids;
  std::vector<retrieval::Snippet> evidence;
  std::size_t abstract_citations = 0;
  std::size_t citations = 0;
  bool contradiction = false;
  std::string text;
  StageBreakdown stages;
  double e2e_ms = 0.0;
  double ftt_ms = 0.0;  // from service start
  std::size_t tokens_in = 0;
  std::size_t tokens_out = 0;
  std::size_t escalate_tokens = 0;  // tokens had this decision escalated
  std::size_t bytes_up = 0;
  std::size_t bytes_down = 0;
  double energy_j = 0.0;
  bool energy_clamped = false;
  int retrieval_cache_hit = -1;  // -1: no retrieval
  int semantic_cache_hit = -1;   // -1: no lookup
  std::size_t redaction_diffs = 0;
  std::size_t surviving_matches = 0;
  secure::GuardVerdict guard = secure::GuardVerdict::kPass;
  decision::QuantLevel quant_level = decision::QuantLevel::kFp16;
  std::string prompt_checksum;
  std::string escalated_payload;  // body sent to the cloud, if any
  std::uint64_t audit_seq = 0;
  std::string reason;
};

// One decision end to end: encode, route, retrieve, sketch, redact, guard,
// memoize, generate, audit. Service times come from the stage model; queueing
// belongs to the caller. Not thread-safe; RPC serializes calls.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, codec::Codebook codebook,
           std::shared_ptr<const retrieval::HybridIndex> index);

  struct Encoded {
    codec::CodeSequence codes;
    std::vector<std::vector<double>> salient;
    std::vector<double> raw_values;
  };
  Encoded encode(const codec::RawWindowRecord& raw, std::size_t codes_per_window = 0) const;
  std::vector<retrieval::ScoredSnippet> retrieve(const codec::CodeSequence& codes,
                                                 const std::string& query_text, bool* cache_hit);

  DecisionOutcome decide(const DecisionInput& input, std::uint64_t draw_seed);
  // Admission refusal: no service, one audit record.
  DecisionOutcome reject(const DecisionInput& input, const std::string& reason);

  void set_quant_level(decision::QuantLevel level) { quant_level_ = level; }
  void set_loss_model(decision::LossModel model) { loss_model_ = std::move(model); }
  void set_router(decision::RouterConfig router);

  // Predicted service time of the cheapest serving path, for admission.
  double predicted_min_service_ms() const;

  const PipelineConfig& config() const { return config_; }
  const secure::AuditLog& audit() const { return audit_; }
  const SemanticCache& semantic_cache() const { return semantic_cache_; }
  const retrieval::RetrievalCache& retrieval_cache() const { return retrieval_cache_; }
  const secure::Redactor& redactor() const { return redactor_; }
  const retrieval::HybridIndex& index() const { return *index_; }
  const decision::CostPredictor& predictor() const { return predictor_; }
  const CodeEmbedder& embedder() const { return embedder_; }
  const codec::Codebook& codebook() const { return codebook_; }

 private:
  secure::DegradeResult degrade(std::vector<retrieval::ScoredSnippet> snippets);

  PipelineConfig config_;
  codec::Codebook codebook_;
  codec::WindowEncoder encoder_;
  std::shared_ptr<const retrieval::HybridIndex> index_;
  CodeEmbedder embedder_;
  retrieval::RetrievalCache retrieval_cache_;
  secure::Redactor redactor_;
  secure::PayloadScanner scanner_;
  secure::PolicyGuard guard_;
  std::unordered_map<std::string, std::pair<retrieval::Snippet, bool>> degraded_;
  decision::CostPredictor predictor_;
  decision::LossModel loss_model_;
  SemanticCache semantic_cache_;
  secure::AuditLog audit_;
  decision::QuantLevel quant_level_ = decision::QuantLevel::kFp16;
  double battery_j_;
};

}  // namespace senseplane::runtime
