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

#include "senseplane/sim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "senseplane/error.hpp"

namespace senseplane::sim {
namespace {

using decision::Action;
using nlohmann::ordered_json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool served(const DecisionRecord& r) {
  return r.action == Action::kEdgeOnly || r.action == Action::kEdgeRag || r.action == Action::kEscalate;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : kNan; }

Percentiles percentiles(const std::vector<double>& v) {
  return {percentile(v, 0.50), percentile(v, 0.90), percentile(v, 0.95)};
}

// Visits every field of PhaseMetrics with its JSON name.
template <typename M, typename F>
void visit(M& m, F&& f) {
  f("decisions", m.decisions);
  f("edge_only", m.edge_only);
  f("edge_rag", m.edge_rag);
  f("escalate", m.escalate);
  f("abstain", m.abstain);
  f("rejected", m.rejected);
  f("ttcr_p50_ms", m.ttcr.p50);
  f("ttcr_p90_ms", m.ttcr.p90);
  f("ttcr_p95_ms", m.ttcr.p95);
  f("e2e_p50_ms", m.e2e.p50);
  f("e2e_p90_ms", m.e2e.p90);
  f("e2e_p95_ms", m.e2e.p95);
  f("edge_only_p50_ms", m.ttcr_by_action[0].p50);
  f("edge_only_p90_ms", m.ttcr_by_action[0].p90);
  f("edge_only_p95_ms", m.ttcr_by_action[0].p95);
  f("edge_rag_p50_ms", m.ttcr_by_action[1].p50);
  f("edge_rag_p90_ms", m.ttcr_by_action[1].p90);
  f("edge_rag_p95_ms", m.ttcr_by_action[1].p95);
  f("escalate_p50_ms", m.ttcr_by_action[2].p50);
  f("escalate_p90_ms", m.ttcr_by_action[2].p90);
  f("escalate_p95_ms", m.ttcr_by_action[2].p95);
  f("encode_ms", m.encode_ms);
  f("retrieval_ms", m.retrieval_ms);
  f("routing_ms", m.routing_ms);
  f("prefill_ms", m.prefill_ms);
  f("decode_ms", m.decode_ms);
  f("post_ms", m.post_ms);
  f("network_ms", m.network_ms);
  f("cache_ms", m.cache_ms);
  f("queue_ms", m.queue_ms);
  f("ftt_ms", m.ftt_ms);
  f("ttcr_mean_ms", m.ttcr_mean_ms);
  f("sla_hit_rate", m.sla_hit_rate);
  f("energy_j_per_decision", m.energy_j_per_decision);
  f("energy_j_per_100_tokens", m.energy_j_per_100_tokens);
  f("bytes_up", m.bytes_up);
  f("bytes_down", m.bytes_down);
  f("tokens_total", m.tokens_total);
  f("tokens_escalated", m.tokens_escalated);
  f("tokens_all_escalate", m.tokens_all_escalate);
  f("pct_saved_locally", m.pct_saved_locally);
  f("escalation_rate", m.escalation_rate);
  f("abstention_rate", m.abstention_rate);
  f("rejection_rate", m.rejection_rate);
  f("coverage", m.coverage);
  f("coverage_normalized_accuracy", m.coverage_normalized_accuracy);
  f("aurc", m.aurc);
  f("ece", m.ece);
  f("auroc_unknown", m.auroc_unknown);
  f("hit_at_k", m.hit_at_k);
  f("mrr", m.mrr);
  f("retrieval_cache_hit_ratio", m.retrieval_cache_hit_ratio);
  f("semantic_cache_hit_ratio", m.semantic_cache_hit_ratio);
  f("citation_rate", m.citation_rate);
  f("abstract_citation_rate", m.abstract_citation_rate);
  f("contradiction_rate", m.contradiction_rate);
  f("audit_completeness", m.audit_completeness);
}

ordered_json phase_json(const PhaseMetrics& m) {
  ordered_json j = ordered_json::object();
  visit(m, [&](const char* name, const auto& v) {
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, double>) {
      j[name] = std::isfinite(v) ? ordered_json(v) : ordered_json();
    } else {
      j[name] = v;
    }
  });
  return j;
}

PhaseMetrics phase_from(const ordered_json& j) {
  PhaseMetrics m;
  visit(m, [&](const char* name, auto& v) {
    using T = std::decay_t<decltype(v)>;
    const auto& x = j.at(name);
    if constexpr (std::is_same_v<T, double>) {
      v = x.is_null() ? kNan : x.get<double>();
    } else {
      v = x.get<T>();
    }
  });
  return m;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return kNan;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::kFormatError, "bad number in table: " + s);
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIoError, "short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& text, std::size_t columns) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != columns) fail(ErrorCode::kFormatError, "curve row has the wrong column count");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    rows.push_back(std::move(row));
  }
  return rows;
}

constexpr const char* kTableHeader =
    "index,event_id,stream_id,arrival_ms,start_ms,finish_ms,queue_ms,cold,action,rule,u,unknown,duplicate,"
    "correct,encode_ms,retrieval_ms,routing_ms,prefill_ms,decode_ms,post_ms,network_ms,cache_ms,e2e_ms,ftt_ms,"
    "ttcr_ms,tokens_in,tokens_out,escalated_tokens,counterfactual_tokens,bytes_up,bytes_down,energy_j,"
    "retrieval_cache_hit,semantic_cache_hit,doc_ids,first_relevant_rank,evidence,citations,abstract_citations,"
    "contradiction,redaction_diffs,guard,quant_level,cost_lat_ms,cost_energy_j,cost_tokens,cost_risk,cost_total,"
    "audit_seq";

}  // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return kNan;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

PhaseMetrics phase_metrics(std::span<const DecisionRecord> records, double audit_completeness) {
  PhaseMetrics m;
  m.decisions = records.size();
  m.audit_completeness = audit_completeness;
  std::vector<double> ttcr;
  std::vector<double> e2e;
  std::array<std::vector<double>, 3> by_action;
  double stage[8] = {};
  double queue = 0.0, ftt = 0.0, energy = 0.0, tokens_out = 0.0;
  std::size_t sla_hits = 0, correct = 0;
  std::size_t retrieval_known = 0, hits = 0;
  double rr = 0.0;
  std::size_t rc_lookups = 0, rc_hits = 0, sc_lookups = 0, sc_hits = 0;
  double evidence = 0.0, citations = 0.0, abstract = 0.0;
  std::size_t with_evidence = 0, contradictions = 0;
  std::vector<decision::SelectiveRecord> selective;
  for (const auto& r : records) {
    switch (r.action) {
      case Action::kEdgeOnly: ++m.edge_only; break;
      case Action::kEdgeRag: ++m.edge_rag; break;
      case Action::kEscalate: ++m.escalate; break;
      case Action::kAbstain: ++m.abstain; break;
      case Action::kRejected: ++m.rejected; break;
    }
    energy += r.energy_j;
    m.bytes_up += static_cast<double>(r.bytes_up);
    m.bytes_down += static_cast<double>(r.bytes_down);
    m.tokens_total += static_cast<double>(r.tokens_in + r.tokens_out);
    tokens_out += static_cast<double>(r.tokens_out);
    m.tokens_escalated += static_cast<double>(r.escalated_tokens);
    m.tokens_all_escalate += static_cast<double>(r.counterfactual_tokens);
    if (r.retrieval_cache_hit >= 0) {
      ++rc_lookups;
      rc_hits += r.retrieval_cache_hit == 1 ? 1 : 0;
      if (!r.unknown) {
        ++retrieval_known;
        if (r.first_relevant_rank > 0) {
          ++hits;
          rr += 1.0 / r.first_relevant_rank;
        }
      }
    }
    if (r.semantic_cache_hit >= 0) {
      ++sc_lookups;
      sc_hits += r.semantic_cache_hit == 1 ? 1 : 0;
    }
    if (r.evidence > 0) {
      ++with_evidence;
      evidence += static_cast<double>(r.evidence);
      citations += static_cast<double>(r.citations);
      abstract += static_cast<double>(r.abstract_citations);
      contradictions += r.contradiction ? 1 : 0;
    }
    if (!served(r)) continue;
    ttcr.push_back(r.ttcr_ms);
    e2e.push_back(r.e2e_ms);
    by_action[decision::serving_index(r.action)].push_back(r.ttcr_ms);
    const auto& s = r.stages;
    const double parts[8] = {s.encode_ms, s.retrieval_ms, s.routing_ms, s.prefill_ms,
                             s.decode_ms, s.post_ms,      s.network_ms, s.cache_ms};
    for (int i = 0; i < 8; ++i) stage[i] += parts[i];
    queue += r.queue_ms;
    ftt += r.ftt_ms;
    sla_hits += r.ttcr_ms <= runtime::kDefaultSloMs ? 1 : 0;
    correct += r.correct ? 1 : 0;
    selective.push_back({r.u, r.correct, r.unknown, -1.0});
  }
  const double n = static_cast<double>(records.size());
  const double ns = static_cast<double>(ttcr.size());
  m.ttcr = percentiles(ttcr);
  m.e2e = percentiles(e2e);
  for (std::size_t a = 0; a < 3; ++a) m.ttcr_by_action[a] = percentiles(by_action[a]);
  double* means[8] = {&m.encode_ms,  &m.retrieval_ms, &m.routing_ms, &m.prefill_ms,
                      &m.decode_ms,  &m.post_ms,      &m.network_ms, &m.cache_ms};
  for (int i = 0; i < 8; ++i) *means[i] = ratio(stage[i], ns);
  m.queue_ms = ratio(queue, ns);
  m.ftt_ms = ratio(ftt, ns);
  double ttcr_sum = 0.0;
  for (const double v : ttcr) ttcr_sum += v;
  m.ttcr_mean_ms = ratio(ttcr_sum, ns);
  m.sla_hit_rate = ratio(static_cast<double>(sla_hits), ns);
  m.energy_j_per_decision = ratio(energy, n);
  m.energy_j_per_100_tokens = ratio(100.0 * energy, tokens_out);
  m.pct_saved_locally = m.tokens_all_escalate > 0.0 ? 1.0 - m.tokens_escalated / m.tokens_all_escalate : kNan;
  m.escalation_rate = ratio(static_cast<double>(m.escalate), n);
  m.abstention_rate = ratio(static_cast<double>(m.abstain), n);
  m.rejection_rate = ratio(static_cast<double>(m.rejected), n);
  m.coverage = ratio(ns, n);
  m.coverage_normalized_accuracy = ratio(static_cast<double>(correct), ns);
  if (selective.size() >= 2) {
    const auto sm = decision::selective_metrics(selective);
    m.aurc = sm.aurc;
    m.ece = sm.ece;
    m.auroc_unknown = sm.auroc_unknown;
  } else {
    m.aurc = m.ece = m.auroc_unknown = kNan;
  }
  m.hit_at_k = ratio(static_cast<double>(hits), static_cast<double>(retrieval_known));
  m.mrr = ratio(rr, static_cast<double>(retrieval_known));
  m.retrieval_cache_hit_ratio = ratio(static_cast<double>(rc_hits), static_cast<double>(rc_lookups));
  m.semantic_cache_hit_ratio = ratio(static_cast<double>(sc_hits), static_cast<double>(sc_lookups));
  m.citation_rate = ratio(citations, evidence);
  m.abstract_citation_rate = ratio(abstract, citations);
  m.contradiction_rate = ratio(static_cast<double>(contradictions), static_cast<double>(with_evidence));
  return m;
}

MetricsReport compute_report(std::span<const DecisionRecord> records, double audit_completeness) {
  MetricsReport report;
  std::vector<DecisionRecord> cold;
  std::vector<DecisionRecord> steady;
  for (const auto& r : records) (r.cold ? cold : steady).push_back(r);
  report.overall = phase_metrics(records, audit_completeness);
  report.cold = phase_metrics(cold, audit_completeness);
  report.steady = phase_metrics(steady, audit_completeness);

  std::vector<decision::SelectiveRecord> selective;
  std::vector<double> ttcr;
  for (const auto& r : records) {
    if (!served(r)) continue;
    selective.push_back({r.u, r.correct, r.unknown, -1.0});
    ttcr.push_back(r.ttcr_ms);
  }
  if (selective.size() >= 2) {
    auto sm = decision::selective_metrics(selective);
    report.risk_coverage = std::move(sm.risk_coverage);
    report.oscr = std::move(sm.oscr);
  }
  if (!ttcr.empty()) {
    for (int i = 0; i <= 200; ++i) {
      const double q = i / 200.0;
      report.latency_cdf.push_back({q, percentile(ttcr, q)});
    }
  }
  return report;
}

std::string report_summary_json(const MetricsReport& report) {
  ordered_json j = {{"format", "senseplane-report"},
                    {"version", 1},
                    {"overall", phase_json(report.overall)},
                    {"cold", phase_json(report.cold)},
                    {"steady", phase_json(report.steady)},
                    {"risk_coverage_points", report.risk_coverage.size()},
                    {"oscr_points", report.oscr.size()},
                    {"latency_cdf_points", report.latency_cdf.size()}};
  return j.dump(2) + "\n";
}

MetricsReport report_from_summary_json(std::string_view text) {
  MetricsReport report;
  try {
    const auto j = ordered_json::parse(text);
    if (j.at("format").get<std::string>() != "senseplane-report") {
      fail(ErrorCode::kFormatError, "not a report summary");
    }
    report.overall = phase_from(j.at("overall"));
    report.cold = phase_from(j.at("cold"));
    report.steady = phase_from(j.at("steady"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("bad report summary: ") + e.what());
  }
  return report;
}

std::string decision_table_csv(std::span<const DecisionRecord> records) {
  std::string out = kTableHeader;
  out += '\n';
  for (const auto& r : records) {
    std::string ids;
    for (std::size_t i = 0; i < r.doc_ids.size(); ++i) ids += (i ? ";" : "") + r.doc_ids[i];
    const auto& s = r.stages;
    const std::vector<std::string> cells = {
        std::to_string(r.index), r.event_id, r.stream_id, fmt(r.arrival_ms), fmt(r.start_ms), fmt(r.finish_ms),
        fmt(r.queue_ms), r.cold ? "1" : "0", std::string(decision::to_string(r.action)), r.rule, fmt(r.u),
        r.unknown ? "1" : "0", r.duplicate ? "1" : "0", r.correct ? "1" : "0", fmt(s.encode_ms),
        fmt(s.retrieval_ms), fmt(s.routing_ms), fmt(s.prefill_ms), fmt(s.decode_ms), fmt(s.post_ms),
        fmt(s.network_ms), fmt(s.cache_ms), fmt(r.e2e_ms), fmt(r.ftt_ms), fmt(r.ttcr_ms),
        std::to_string(r.tokens_in), std::to_string(r.tokens_out), std::to_string(r.escalated_tokens),
        std::to_string(r.counterfactual_tokens), std::to_string(r.bytes_up), std::to_string(r.bytes_down),
        fmt(r.energy_j), std::to_string(r.retrieval_cache_hit), std::to_string(r.semantic_cache_hit), ids,
        std::to_string(r.first_relevant_rank), std::to_string(r.evidence), std::to_string(r.citations),
        std::to_string(r.abstract_citations), r.contradiction ? "1" : "0", std::to_string(r.redaction_diffs),
        r.guard, r.quant_level, fmt(r.cost.lat_ms), fmt(r.cost.energy_j), fmt(r.cost.tokens), fmt(r.cost.risk),
        fmt(r.cost.total), std::to_string(r.audit_seq)};
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }
  return out;
}

std::vector<DecisionRecord> decision_table_from_csv(std::string_view text) {
  std::vector<DecisionRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kTableHeader) fail(ErrorCode::kFormatError, "decision table header mismatch");
  const std::size_t columns = split(kTableHeader, ',').size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != columns) fail(ErrorCode::kFormatError, "decision row has the wrong column count");
    DecisionRecord r;
    std::size_t i = 0;
    const auto num = [&] { return parse_double(c[i++]); };
    const auto count = [&] { return static_cast<std::size_t>(std::stoull(c[i++])); };
    const auto flag = [&] { return c[i++] == "1"; };
    r.index = count();
    r.event_id = c[i++];
    r.stream_id = c[i++];
    r.arrival_ms = num();
    r.start_ms = num();
    r.finish_ms = num();
    r.queue_ms = num();
    r.cold = flag();
    r.action = decision::action_from_string(c[i++]);
    r.rule = c[i++];
    r.u = num();
    r.unknown = flag();
    r.duplicate = flag();
    r.correct = flag();
    auto& s = r.stages;
    s.encode_ms = num();
    s.retrieval_ms = num();
    s.routing_ms = num();
    s.prefill_ms = num();
    s.decode_ms = num();
    s.post_ms = num();
    s.network_ms = num();
    s.cache_ms = num();
    r.e2e_ms = num();
    r.ftt_ms = num();
    r.ttcr_ms = num();
    r.tokens_in = count();
    r.tokens_out = count();
    r.escalated_tokens = count();
    r.counterfactual_tokens = count();
    r.bytes_up = count();
    r.bytes_down = count();
    r.energy_j = num();
    r.retrieval_cache_hit = std::stoi(c[i++]);
    r.semantic_cache_hit = std::stoi(c[i++]);
    if (!c[i].empty()) r.doc_ids = split(c[i], ';');
    ++i;
    r.first_relevant_rank = std::stoi(c[i++]);
    r.evidence = count();
    r.citations = count();
    r.abstract_citations = count();
    r.contradiction = flag();
    r.redaction_diffs = count();
    r.guard = c[i++];
    r.quant_level = c[i++];
    r.cost.lat_ms = num();
    r.cost.energy_j = num();
    r.cost.tokens = num();
    r.cost.risk = num();
    r.cost.total = num();
    r.audit_seq = count();
    out.push_back(std::move(r));
  }
  return out;
}

void emit_report(const MetricsReport& report, std::span<const DecisionRecord> records,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + dir.string());
  write_text(dir / "summary.json", report_summary_json(report));
  write_text(dir / "decisions.csv", decision_table_csv(records));
  std::string rc = "threshold,coverage,risk\n";
  for (const auto& p : report.risk_coverage) rc += fmt(p.threshold) + "," + fmt(p.coverage) + "," + fmt(p.risk) + "\n";
  write_text(dir / "risk_coverage.csv", rc);
  std::string oscr = "threshold,correct_known_rate,false_accept_rate\n";
  for (const auto& p : report.oscr) {
    oscr += fmt(p.threshold) + "," + fmt(p.correct_known_rate) + "," + fmt(p.false_accept_rate) + "\n";
  }
  write_text(dir / "oscr.csv", oscr);
  std::string cdf = "quantile,ttcr_ms\n";
  for (const auto& p : report.latency_cdf) cdf += fmt(p.quantile) + "," + fmt(p.ttcr_ms) + "\n";
  write_text(dir / "latency_cdf.csv", cdf);
}

MetricsReport read_report(const std::filesystem::path& dir) {
  MetricsReport report = report_from_summary_json(read_text(dir / "summary.json"));
  for (const auto& row : read_numeric_csv(read_text(dir / "risk_coverage.csv"), 3)) {
    report.risk_coverage.push_back({row[0], row[1], row[2]});
  }
  for (const auto& row : read_numeric_csv(read_text(dir / "oscr.csv"), 3)) {
    report.oscr.push_back({row[0], row[1], row[2]});
  }
  for (const auto& row : read_numeric_csv(read_text(dir / "latency_cdf.csv"), 2)) {
    report.latency_cdf.push_back({row[0], row[1]});
  }
  return report;
}

}  // namespace senseplane::sim
