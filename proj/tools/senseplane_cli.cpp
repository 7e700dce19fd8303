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

// Command-line front end: trace generation, replay, calibration, reporting,
// audit verification, corpus ingest and the RPC server.

#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "senseplane/decision/router.hpp"
#include "senseplane/error.hpp"
#include "senseplane/retrieval/corpus_io.hpp"
#include "senseplane/retrieval/hybrid_index.hpp"
#include "senseplane/runtime/config.hpp"
#include "senseplane/runtime/rpc.hpp"
#include "senseplane/secure/audit.hpp"
#include "senseplane/sim/replay.hpp"
#include "senseplane/sim/report.hpp"

namespace {

using namespace senseplane;
using nlohmann::ordered_json;

constexpr int kExitInvariant = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

runtime::PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? runtime::PipelineConfig{} : runtime::load_config(path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Checks the invariants every replay must satisfy; returns the violations.
std::vector<std::string> check_invariants(const sim::ReplayResult& result, const sim::MetricsReport& report,
                                          const secure::AuditVerification& audit) {
  std::vector<std::string> bad;
  const auto& o = report.overall;
  if (o.edge_only + o.edge_rag + o.escalate + o.abstain + o.rejected != o.decisions) {
    bad.push_back("action counts do not add up to decisions");
  }
  if (audit.valid_records != result.records.size() || !audit.complete || audit.completeness != 1.0) {
    bad.push_back("audit log is not complete");
  }
  for (const auto* m : {&report.overall, &report.cold, &report.steady}) {
    for (const double r : {m->sla_hit_rate, m->escalation_rate, m->abstention_rate, m->rejection_rate, m->coverage,
                           m->semantic_cache_hit_ratio, m->retrieval_cache_hit_ratio, m->hit_at_k}) {
      if (!std::isnan(r) && (r < 0.0 || r > 1.0)) bad.push_back("a rate lies outside [0,1]");
    }
    if (!std::isnan(m->ttcr.p50) && !(m->ttcr.p50 <= m->ttcr.p90 && m->ttcr.p90 <= m->ttcr.p95)) {
      bad.push_back("latency percentiles are not monotone");
    }
  }
  for (const auto& r : result.records) {
    if (r.rule == "egress-blocked") bad.push_back("an escalated payload failed the egress scan");
  }
  return bad;
}

int cmd_gen_trace(const std::string& out, sim::TraceSpec spec) {
  const sim::Trace trace = sim::generate_trace(spec);
  sim::write_trace(trace, out);
  std::printf("wrote %zu events to %s\n", trace.events.size(), out.c_str());
  return 0;
}

struct ReplayArgs {
  std::string trace;
  std::string config;
  std::string mode = "deterministic";
  std::string out;
  std::string force;
  std::string link;
};

sim::ReplayOptions replay_options(const ReplayArgs& a) {
  sim::ReplayOptions o;
  o.mode = sim::replay_mode_from_string(a.mode);
  if (!a.force.empty()) o.forced = decision::action_from_string(a.force);
  if (!a.link.empty()) o.link = runtime::LinkProfile::by_name(a.link);
  return o;
}

int cmd_replay(const ReplayArgs& a) {
  const auto trace = sim::read_trace(a.trace);
  const auto config = config_or_default(a.config);
  const auto result = sim::replay(trace, config, replay_options(a));
  const auto audit = secure::verify_audit(result.audit_log);
  const auto report = sim::compute_report(result.records, audit.completeness);
  std::filesystem::create_directories(a.out);
  sim::emit_report(report, result.records, a.out);
  {
    std::ofstream log(std::filesystem::path(a.out) / "audit.log", std::ios::binary);
    log << result.audit_log;
  }
  const auto& o = report.overall;
  std::printf("decisions %zu  edge %zu  rag %zu  escalate %zu  abstain %zu  rejected %zu\n", o.decisions, o.edge_only,
              o.edge_rag, o.escalate, o.abstain, o.rejected);
  std::printf("ttcr p50/p90/p95 %.1f/%.1f/%.1f ms  sla %.4f  saved %.4f\n", o.ttcr.p50, o.ttcr.p90, o.ttcr.p95,
              o.sla_hit_rate, o.pct_saved_locally);
  const auto bad = check_invariants(result, report, audit);
  for (const auto& b : bad) std::fprintf(stderr, "invariant violated: %s\n", b.c_str());
  return bad.empty() ? 0 : kExitInvariant;
}

int cmd_calibrate(const ReplayArgs& a, double rho, const std::string& samples_out) {
  const auto trace = sim::read_trace(a.trace);
  auto config = config_or_default(a.config);
  const auto options = replay_options(a);
  const auto world = sim::build_world(trace, config, options.world);
  const auto samples = sim::collect_regret_samples(trace, world, config, options);
  const auto grid = decision::default_threshold_grid();
  const auto cal = decision::calibrate_thresholds(samples, grid, rho);
  if (!samples_out.empty()) {
    std::ofstream out(samples_out);
    for (const auto& s : samples) {
      ordered_json j = {{"u", s.u}, {"loss", s.loss}, {"chosen", decision::to_string(s.chosen)},
                        {"slo_hit", s.slo_hit}, {"correct", s.correct}};
      ordered_json costs = ordered_json::array();
      for (const auto& c : s.cost) {
        costs.push_back({{"lat_ms", c.lat_ms}, {"energy_j", c.energy_j}, {"tokens", c.tokens},
                         {"risk", c.risk}, {"total", c.total}});
      }
      j["cost"] = costs;
      out << j.dump() << '\n';
    }
  }
  config.router.theta_edge = cal.theta_edge;
  config.router.theta_esc = cal.theta_esc;
  config.router.rho = rho;
  runtime::save_config(config, a.out);
  std::printf("samples %zu  theta_edge %.2f  theta_esc %.2f  regret %.6f\n", samples.size(), cal.theta_edge,
              cal.theta_esc, cal.regret);
  return 0;
}

int cmd_report(const std::string& dir) {
  const auto stored = sim::read_report(dir);
  const auto records = sim::decision_table_from_csv(read_file((std::filesystem::path(dir) / "decisions.csv").string()));
  const auto recomputed = sim::compute_report(records, stored.overall.audit_completeness);
  std::cout << sim::report_summary_json(recomputed);
  if (sim::report_summary_json(recomputed) != sim::report_summary_json(stored)) {
    std::fprintf(stderr, "invariant violated: summary differs from the per-decision table\n");
    return kExitInvariant;
  }
  return 0;
}

int cmd_verify_audit(const std::string& path, bool strict) {
  const auto v = secure::verify_audit_file(path, strict);
  std::printf("lines %zu  valid %zu  expected %zu  completeness %.6f  gaps %zu\n", v.lines, v.valid_records,
              v.expected_records, v.completeness, v.gaps.size());
  for (const auto& g : v.gaps) {
    std::printf("  line %zu: %s %s\n", g.line, std::string(secure::to_string(g.kind)).c_str(), g.detail.c_str());
  }
  return v.complete ? 0 : kExitInvariant;
}

int cmd_ingest(const std::string& corpus, const std::string& out, const std::string& config_path) {
  const auto config = config_or_default(config_path);
  retrieval::HybridIndex index(config.retrieval);
  for (const auto& s : retrieval::read_corpus(corpus)) index.add(s);
  index.save(out);
  std::printf("indexed %zu snippets into %s\n", index.size(), out.c_str());
  return 0;
}

int cmd_serve(const std::string& socket, const std::string& trace_path, const std::string& config_path) {
  const auto trace = sim::read_trace(trace_path);
  const auto config = config_or_default(config_path);
  const auto world = sim::build_world(trace, config);
  runtime::Pipeline pipeline(config, world.codebook, world.index);
  runtime::RpcHandler handler(pipeline);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::printf("serving on %s\n", socket.c_str());
  std::fflush(stdout);
  runtime::serve_unix(socket, handler, g_stop);
  return 0;
}

int cmd_call(const std::string& socket, const std::string& request) {
  runtime::RpcClient client(socket);
  std::cout << client.call(request) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"senseplane: edge/cloud decision plane and trace-driven simulator"};
  app.require_subcommand(1);

  sim::TraceSpec spec;
  std::string trace_out;
  auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic trace");
  gen->add_option("--out", trace_out, "Trace file to write")->required();
  gen->add_option("--duration-s", spec.duration_s, "Trace length in seconds");
  gen->add_option("--rate-hz", spec.rate_hz, "Poisson arrival rate");
  gen->add_option("--k", spec.k_values, "Codes per window (one or more values, drawn uniformly)");
  gen->add_option("--unknown-fraction", spec.unknown_fraction, "Share of unknown events");
  gen->add_option("--duplicate-fraction", spec.duplicate_fraction, "Share of duplicated events");
  gen->add_option("--pii-fraction", spec.pii_fraction, "Share of events whose note carries PII");
  gen->add_option("--pii-strings", spec.pii_strings, "Number of seeded PII strings");
  gen->add_option("--topics", spec.topics, "Known topics (max 12)");
  gen->add_option("--streams", spec.streams, "Number of streams");
  gen->add_option("--link", spec.link, "Link profile applied to every event (good|moderate|poor)");
  gen->add_option("--seed", spec.seed, "Seed");

  ReplayArgs ra;
  auto* rep = app.add_subcommand("replay", "Replay a trace through the pipeline and emit the report");
  rep->add_option("--trace", ra.trace, "Trace file")->required();
  rep->add_option("--config", ra.config, "Pipeline config JSON");
  rep->add_option("--mode", ra.mode, "deterministic or pipelined");
  rep->add_option("--out", ra.out, "Report directory")->required();
  rep->add_option("--force", ra.force, "Force every decision to EdgeOnly, EdgeRag or Escalate");
  rep->add_option("--link", ra.link, "Override the link profile");

  ReplayArgs ca;
  double rho = 1.0;
  std::string samples_out;
  auto* cal = app.add_subcommand("calibrate", "Fit router thresholds by regret minimization");
  cal->add_option("--trace", ca.trace, "Held-out trace")->required();
  cal->add_option("--config", ca.config, "Base pipeline config");
  cal->add_option("--out", ca.out, "Config file to write with the fitted thresholds")->required();
  cal->add_option("--rho", rho, "Loss/cost tradeoff");
  cal->add_option("--samples", samples_out, "Also write the regret samples as JSON lines");
  cal->add_option("--mode", ca.mode, "deterministic or pipelined");

  std::string report_dir;
  auto* rpt = app.add_subcommand("report", "Recompute a report from its per-decision table and check it");
  rpt->add_option("--dir", report_dir, "Report directory written by replay")->required();

  std::string audit_path;
  bool strict = false;
  auto* va = app.add_subcommand("verify-audit", "Verify an audit log");
  va->add_option("--log", audit_path, "Audit log file")->required();
  va->add_flag("--strict", strict, "Fail on the first checksum mismatch");

  std::string corpus, index_out, ingest_config;
  auto* ing = app.add_subcommand("ingest", "Build a persisted hybrid index from a corpus file");
  ing->add_option("--corpus", corpus, "Line-delimited snippet records")->required();
  ing->add_option("--out", index_out, "Index directory")->required();
  ing->add_option("--config", ingest_config, "Pipeline config JSON");

  std::string socket, serve_trace, serve_config;
  auto* srv = app.add_subcommand("serve", "Serve Encode/Retrieve/RouteAndGenerate on a Unix socket");
  srv->add_option("--socket", socket, "Socket path")->required();
  srv->add_option("--trace", serve_trace, "Trace whose header defines the world")->required();
  srv->add_option("--config", serve_config, "Pipeline config JSON");

  std::string call_socket, call_request;
  auto* call = app.add_subcommand("call", "Send one request line to a running server");
  call->add_option("--socket", call_socket, "Socket path")->required();
  call->add_option("--request", call_request, "JSON request line")->required();

  auto* dump = app.add_subcommand("dump-config", "Print the default config");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen_trace(trace_out, spec);
    if (*rep) return cmd_replay(ra);
    if (*cal) return cmd_calibrate(ca, rho, samples_out);
    if (*rpt) return cmd_report(report_dir);
    if (*va) return cmd_verify_audit(audit_path, strict);
    if (*ing) return cmd_ingest(corpus, index_out, ingest_config);
    if (*srv) return cmd_serve(socket, serve_trace, serve_config);
    if (*call) return cmd_call(call_socket, call_request);
    if (*dump) {
      std::cout << runtime::config_to_json(runtime::PipelineConfig{});
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
