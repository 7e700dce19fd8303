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

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "senseplane/decision/uncertainty.hpp"
#include "senseplane/error.hpp"
#include "senseplane/sim/replay.hpp"
#include "senseplane/sim/report.hpp"
#include "senseplane/sim/trace.hpp"

namespace senseplane::sim {
namespace {

TraceSpec spec_of(double duration_s, std::uint64_t seed) {
  TraceSpec s;
  s.duration_s = duration_s;
  s.seed = seed;
  return s;
}

TEST(Trace, PoissonCountWithinThreeSigma) {
  const TraceSpec s = spec_of(3600.0, 4);
  const auto t = generate_trace(s);
  const double mean = s.rate_hz * s.duration_s;
  EXPECT_LE(std::abs(static_cast<double>(t.events.size()) - mean), 3.0 * std::sqrt(mean));
  for (std::size_t i = 1; i < t.events.size(); ++i) {
    EXPECT_LE(t.events[i - 1].arrival_ms, t.events[i].arrival_ms);
  }
}

TEST(Trace, UnknownShareWithinThreeSigma) {
  const auto t = generate_trace(spec_of(7200.0, 5));
  std::size_t unknown = 0;
  for (const auto& e : t.events) unknown += e.unknown ? 1 : 0;
  const double n = static_cast<double>(t.events.size());
  const double p = 0.18;
  EXPECT_LE(std::abs(unknown / n - p), 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Trace, DuplicatesCopyThePreviousEvent) {
  TraceSpec s = spec_of(1800.0, 6);
  s.duplicate_fraction = 0.3;
  const auto t = generate_trace(s);
  std::size_t dups = 0;
  for (std::size_t i = 1; i < t.events.size(); ++i) {
    if (!t.events[i].duplicate) continue;
    ++dups;
    EXPECT_EQ(t.events[i].window_seed, t.events[i - 1].window_seed);
    EXPECT_EQ(t.events[i].note, t.events[i - 1].note);
  }
  const double n = static_cast<double>(t.events.size() - 1);
  EXPECT_LE(std::abs(dups / n - 0.3), 3.0 * std::sqrt(0.21 / n));
}

TEST(Trace, DeterministicAndRoundTrips) {
  const auto a = generate_trace(spec_of(600.0, 9));
  const auto b = generate_trace(spec_of(600.0, 9));
  const std::string text = trace_to_string(a);
  EXPECT_EQ(text, trace_to_string(b));
  EXPECT_EQ(trace_to_string(trace_from_string(text)), text);
  EXPECT_NE(text, trace_to_string(generate_trace(spec_of(600.0, 10))));
}

TEST(Trace, CorruptionIsReported) {
  const std::string text = trace_to_string(generate_trace(spec_of(120.0, 2)));
  const auto last_line = text.rfind('\n', text.size() - 2);
  const auto expect_corrupt = [](const std::string& s) {
    try {
      trace_from_string(s);
      ADD_FAILURE() << "accepted corrupt trace";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kTraceCorrupt);
    }
  };
  expect_corrupt(text.substr(0, last_line + 1));
  expect_corrupt(text.substr(0, text.size() / 2));
  expect_corrupt("");
}

TEST(Trace, InvalidSpecRejected) {
  TraceSpec s;
  s.rate_hz = 0.0;
  EXPECT_THROW(generate_trace(s), Error);
  s = TraceSpec{};
  s.unknown_fraction = 1.5;
  EXPECT_THROW(generate_trace(s), Error);
}

TEST(Trace, PosteriorHitsTargetEntropy) {
  for (const double u : {0.0, 0.1, 0.35, 0.5, 0.8, 0.99}) {
    const auto p = posterior_with_entropy(u, 8, 3);
    EXPECT_NEAR(decision::entropy(p), u, 1e-6);
    EXPECT_EQ(std::max_element(p.begin(), p.end()) - p.begin(), 3);
  }
}

TEST(Report, PercentileInterpolates) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4, 5}, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(percentile({10, 20}, 0.95), 19.5);
  EXPECT_TRUE(std::isnan(percentile({}, 0.5)));
}

TEST(Report, EmptyTraceGivesZeroDecisions) {
  const auto r = compute_report({});
  EXPECT_EQ(r.overall.decisions, 0u);
  const auto back = report_from_summary_json(report_summary_json(r));
  EXPECT_EQ(back.overall.decisions, 0u);
}

class SmallReplay : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    trace_ = new Trace(generate_trace(spec_of(900.0, 12)));
    result_ = new ReplayResult(replay(*trace_, runtime::PipelineConfig{}, small_options()));
  }
  static void TearDownTestSuite() {
    delete trace_;
    delete result_;
  }
  static ReplayOptions small_options() {
    ReplayOptions o;
    o.world.codebook_size = 32;
    o.world.training_windows_per_topic = 6;
    o.world.kmeans_iterations = 8;
    o.world.docs_per_topic = 4;
    o.cold_phase_ms = 300000.0;
    return o;
  }
  static Trace* trace_;
  static ReplayResult* result_;
};

Trace* SmallReplay::trace_ = nullptr;
ReplayResult* SmallReplay::result_ = nullptr;

TEST_F(SmallReplay, ConservationAndStageSums) {
  const auto& recs = result_->records;
  ASSERT_EQ(recs.size(), trace_->events.size());
  const auto r = compute_report(recs);
  const auto& m = r.overall;
  EXPECT_EQ(m.decisions, m.edge_only + m.edge_rag + m.escalate + m.abstain + m.rejected);
  EXPECT_EQ(r.cold.decisions + r.steady.decisions, m.decisions);
  for (const auto& d : recs) {
    if (d.action == decision::Action::kRejected) continue;
    EXPECT_NEAR(d.e2e_ms, d.stages.sum(), 1e-9);
    EXPECT_NEAR(d.ttcr_ms, d.queue_ms + d.e2e_ms, 1e-6);
    EXPECT_GE(d.start_ms, d.arrival_ms);
  }
  const auto v = secure::verify_audit(result_->audit_log);
  EXPECT_EQ(v.valid_records, recs.size());
}

TEST_F(SmallReplay, RerunIsIdentical) {
  const auto again = replay(*trace_, runtime::PipelineConfig{}, small_options());
  EXPECT_EQ(decision_table_csv(again.records), decision_table_csv(result_->records));
  EXPECT_EQ(again.audit_log, result_->audit_log);
}

TEST_F(SmallReplay, ReportFilesRoundTripAndRecompute) {
  const auto report = compute_report(result_->records);
  const auto dir = std::filesystem::temp_directory_path() / "senseplane-report-test";
  std::filesystem::remove_all(dir);
  emit_report(report, result_->records, dir);
  const auto back = read_report(dir);
  EXPECT_EQ(report_summary_json(back), report_summary_json(report));
  const auto table = decision_table_from_csv(decision_table_csv(result_->records));
  ASSERT_EQ(table.size(), result_->records.size());
  EXPECT_EQ(report_summary_json(compute_report(table)), report_summary_json(report));
  std::filesystem::remove_all(dir);
}

TEST_F(SmallReplay, ForcedActionIsHonoured) {
  auto opts = small_options();
  opts.forced = decision::Action::kEdgeRag;
  const auto forced = replay(*trace_, runtime::PipelineConfig{}, opts);
  for (const auto& d : forced.records) {
    EXPECT_TRUE(d.action == decision::Action::kEdgeRag || d.action == decision::Action::kRejected);
  }
}

}  // namespace
}  // namespace senseplane::sim
