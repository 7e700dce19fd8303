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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "senseplane/decision/selective.hpp"
#include "senseplane/sim/replay.hpp"

namespace senseplane::sim {

// NaN marks a percentile or ratio with no data; it is written as null.
struct Percentiles {
  double p50 = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
};

struct PhaseMetrics {
  std::size_t decisions = 0;
  std::size_t edge_only = 0;
  std::size_t edge_rag = 0;
  std::size_t escalate = 0;
  std::size_t abstain = 0;
  std::size_t rejected = 0;
  Percentiles ttcr;  // served decisions, queueing included
  Percentiles e2e;   // served decisions, stage sum
  std::array<Percentiles, 3> ttcr_by_action{};
  // Mean per-stage time over served decisions.
  double encode_ms = 0.0;
  double retrieval_ms = 0.0;
  double routing_ms = 0.0;
  double prefill_ms = 0.0;
  double decode_ms = 0.0;
  double post_ms = 0.0;
  double network_ms = 0.0;
  double cache_ms = 0.0;
  double queue_ms = 0.0;
  double ftt_ms = 0.0;
  double ttcr_mean_ms = 0.0;
  double sla_hit_rate = 0.0;
  double energy_j_per_decision = 0.0;
  double energy_j_per_100_tokens = 0.0;
  double bytes_up = 0.0;
  double bytes_down = 0.0;
  double tokens_total = 0.0;
  double tokens_escalated = 0.0;
  double tokens_all_escalate = 0.0;
  double pct_saved_locally = 0.0;
  double escalation_rate = 0.0;
  double abstention_rate = 0.0;
  double rejection_rate = 0.0;
  double coverage = 0.0;
  double coverage_normalized_accuracy = 0.0;
  double aurc = 0.0;
  double ece = 0.0;
  double auroc_unknown = 0.0;
  double hit_at_k = 0.0;
  double mrr = 0.0;
  double retrieval_cache_hit_ratio = 0.0;
  double semantic_cache_hit_ratio = 0.0;
  double citation_rate = 0.0;
  double abstract_citation_rate = 0.0;
  double contradiction_rate = 0.0;
  double audit_completeness = 1.0;
};

struct LatencyCdfPoint {
  double quantile = 0.0;
  double ttcr_ms = 0.0;
};

struct MetricsReport {
  PhaseMetrics overall;
  PhaseMetrics cold;
  PhaseMetrics steady;
  std::vector<decision::RiskCoveragePoint> risk_coverage;
  std::vector<decision::OscrPoint> oscr;
  std::vector<LatencyCdfPoint> latency_cdf;
};

// Linear-interpolated percentile of an unsorted sample; NaN when empty.
double percentile(std::vector<double> values, double q);

PhaseMetrics phase_metrics(std::span<const DecisionRecord> records, double audit_completeness = 1.0);
// Curves use the served decisions of the whole run.
MetricsReport compute_report(std::span<const DecisionRecord> records, double audit_completeness = 1.0);

std::string report_summary_json(const MetricsReport& report);
MetricsReport report_from_summary_json(std::string_view text);

std::string decision_table_csv(std::span<const DecisionRecord> records);
std::vector<DecisionRecord> decision_table_from_csv(std::string_view text);

// Writes summary.json, decisions.csv, risk_coverage.csv, oscr.csv and
// latency_cdf.csv into `dir`. Throws IoError.
void emit_report(const MetricsReport& report, std::span<const DecisionRecord> records,
                 const std::filesystem::path& dir);
// Reads summary.json and the curve files back.
MetricsReport read_report(const std::filesystem::path& dir);

}  // namespace senseplane::sim
