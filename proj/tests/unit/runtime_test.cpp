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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <numeric>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>

#include "json.hpp"
#include "senseplane/error.hpp"
#include "senseplane/random.hpp"
#include "senseplane/runtime/backend.hpp"
#include "senseplane/runtime/config.hpp"
#include "senseplane/runtime/energy.hpp"
#include "senseplane/runtime/pipeline.hpp"
#include "senseplane/runtime/rpc.hpp"
#include "senseplane/runtime/scheduler.hpp"
#include "senseplane/runtime/semantic_cache.hpp"
#include "senseplane/sim/world.hpp"

namespace senseplane::runtime {
namespace {

using nlohmann::json;

// Brute force: some service order meets every deadline starting at `now`.
bool feasible(std::vector<Request> reqs, double now) {
  std::sort(reqs.begin(), reqs.end(), [](const Request& a, const Request& b) { return a.id < b.id; });
  do {
    double t = now;
    bool ok = true;
    for (const auto& r : reqs) {
      t += r.predicted_service_ms;
      if (t > r.deadline_ms) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(reqs.begin(), reqs.end(),
                                 [](const Request& a, const Request& b) { return a.id < b.id; }));
  return false;
}

TEST(EdfScheduler, MeetsDeadlinesWheneverAnyOrderDoes) {
  Rng rng(8);
  std::size_t feasible_count = 0;
  for (int t = 0; t < 400; ++t) {
    const std::size_t n = 1 + rng.index(6);
    std::vector<Request> reqs;
    for (std::size_t i = 0; i < n; ++i) {
      Request r = Request::make(i, rng.uniform(0, 40), rng.uniform(20, 200), rng.uniform(100, 900));
      reqs.push_back(r);
    }
    EdfScheduler s(SchedulerConfig{1e9, 6});
    for (const auto& r : reqs) s.submit(r);
    const Batch b = s.next_batch(50.0);
    if (!feasible(reqs, 50.0)) continue;
    ++feasible_count;
    EXPECT_TRUE(b.rejected.empty());
    double clock = 50.0;
    for (const auto& r : b.requests) {
      clock += r.predicted_service_ms;
      EXPECT_LE(clock, r.deadline_ms);
    }
    EXPECT_EQ(b.requests.size(), n);
  }
  EXPECT_GT(feasible_count, 100u);
}

TEST(EdfScheduler, BatchesRespectWindowAndSize) {
  Rng rng(12);
  EdfScheduler s;
  double t = 0.0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    t += rng.exponential(1.0 / 15.0);
    s.submit(Request::make(i, t, 5.0, 5000.0));
  }
  std::size_t served = 0;
  double now = 0.0;
  while (!s.empty()) {
    const Batch b = s.next_batch(now);
    EXPECT_TRUE(b.rejected.empty());
    ASSERT_FALSE(b.requests.empty());
    EXPECT_LE(b.requests.size(), 4u);
    double lo = 1e300;
    double hi = -1e300;
    for (const auto& r : b.requests) {
      lo = std::min(lo, r.arrival_ms);
      hi = std::max(hi, r.arrival_ms);
    }
    EXPECT_LE(hi - lo, 50.0);
    served += b.requests.size();
    now += 1.0;
  }
  EXPECT_EQ(served, 300u);
}

TEST(EdfScheduler, RejectsHopelessRequestWithReason) {
  EdfScheduler s;
  s.submit(Request::make(1, 0.0, 900.0, 750.0));
  const Batch b = s.next_batch(0.0);
  EXPECT_TRUE(b.requests.empty());
  ASSERT_EQ(b.rejected.size(), 1u);
  EXPECT_FALSE(b.rejected[0].reason.empty());
  EXPECT_TRUE(s.empty());
}

TEST(DownshiftController, HysteresisSteps) {
  DownshiftController c;
  using decision::QuantLevel;
  EXPECT_EQ(c.tick(9), QuantLevel::kFp16);
  EXPECT_EQ(c.tick(9), QuantLevel::kFp16);
  EXPECT_EQ(c.tick(9), QuantLevel::kInt8);
  EXPECT_EQ(c.tick(9), QuantLevel::kInt8);
  EXPECT_EQ(c.tick(5), QuantLevel::kInt8);
  for (int i = 0; i < 2; ++i) c.tick(9);
  EXPECT_EQ(c.tick(9), QuantLevel::kInt4);
  for (int i = 0; i < 3; ++i) c.tick(9);
  EXPECT_EQ(c.level(), QuantLevel::kInt4);
  c.tick(1);
  c.tick(1);
  EXPECT_EQ(c.tick(1), QuantLevel::kInt8);
  EXPECT_THROW(DownshiftController(DownshiftConfig{2, 8, 3}), Error);
}

TEST(EnergyMeter, HandExample) {
  const std::vector<StageEvent> ev = {{"prefill", 9.0, 100.0}, {"decode", 5.5, 100.0}};
  // (9 - 1.5) * 0.1 + (5.5 - 1.5) * 0.1 = 1.15 J
  const auto r = energy_meter(ev, 1.5, 50);
  EXPECT_NEAR(r.joules, 1.15, 1e-12);
  EXPECT_NEAR(r.joules_per_100_tokens, 2.3, 1e-12);
  const std::vector<StageEvent> one = {{"x", 5.5, 100.0}};
  EXPECT_NEAR(energy_meter(one, 1.5).joules, 0.4, 1e-12);
  const std::vector<StageEvent> below = {{"x", 1.0, 100.0}};
  EXPECT_TRUE(energy_meter(below, 1.5).clamped);
  const std::vector<StageEvent> bad = {{"x", 1.0, -1.0}};
  EXPECT_THROW(energy_meter(bad, 1.5), Error);
}

SemanticCacheEntry entry(const Digest128& key, std::string text, std::int64_t t) {
  SemanticCacheEntry e;
  e.key = key;
  e.text = std::move(text);
  e.created_ms = t;
  return e;
}

TEST(SemanticCache, KeyIgnoresOrderOfIdsAndEntities) {
  const std::vector<std::uint32_t> codes = {3, 1, 4};
  EXPECT_EQ(SemanticCache::make_key(codes, {"b", "a"}, {"x", "y", "x"}),
            SemanticCache::make_key(codes, {"a", "b"}, {"y", "x"}));
  const std::vector<std::uint32_t> other = {3, 4, 1};
  EXPECT_NE(SemanticCache::make_key(codes, {}, {}), SemanticCache::make_key(other, {}, {}));
}

TEST(SemanticCache, HitReturnsStoredTextAndAges) {
  SemanticCacheConfig cfg;
  cfg.capacity = 2;
  cfg.max_age_ms = 1000;
  SemanticCache c(cfg);
  const std::vector<std::uint32_t> k1 = {1};
  const std::vector<std::uint32_t> k2 = {2};
  const std::vector<std::uint32_t> k3 = {3};
  const auto a = SemanticCache::make_key(k1, {}, {});
  const auto b = SemanticCache::make_key(k2, {}, {});
  const auto d = SemanticCache::make_key(k3, {}, {});
  EXPECT_TRUE(c.store(entry(a, "alpha", 0)));
  EXPECT_FALSE(c.store(entry(a, "other", 0)));
  EXPECT_EQ(c.lookup(a, 10)->text, "alpha");
  EXPECT_FALSE(c.lookup(b, 10).has_value());
  c.store(entry(b, "beta", 0));
  c.lookup(a, 20);
  c.store(entry(d, "delta", 0));
  EXPECT_FALSE(c.lookup(b, 30).has_value());
  EXPECT_EQ(c.exemplars().size(), 1u);
  EXPECT_FALSE(c.lookup(a, 5000).has_value());
  EXPECT_EQ(c.hits(), 2u);
  EXPECT_EQ(c.misses(), 3u);
  EXPECT_EQ(c.age_out(5000), 2u);
  EXPECT_EQ(c.size(), 0u);
}

codec::PromptSketch sketch_of(std::size_t bytes, bool redacted) {
  codec::PromptSketch sk;
  sk.body = "[Semantics]z=1;h=0.100\n" + std::string(bytes - 23, 'x');
  sk.token_estimate = 100;
  sk.redacted = redacted;
  return sk;
}

TEST(Generation, CloudUplinkTransferTime) {
  const auto poor = LinkProfile::poor();
  StageScores scores;  // link_z 0, no burst
  const LinkDraw draw = draw_link(poor, scores);
  EXPECT_DOUBLE_EQ(draw.rtt_ms, 80.0);
  const auto backend = BackendModel::cloud(StageTable::reference());
  const auto g = generate_cloud(sketch_of(4096, true), poor, draw, backend, 240, 0.0, 0.0);
  EXPECT_EQ(g.bytes_up, 4096u + 256u);
  EXPECT_NEAR(g.up_ms, (4096.0 + 256.0) * 8.0 / 4000.0, 1e-9);
  EXPECT_NEAR(g.ttcr_ms, g.serialization_ms + g.up_ms + g.rtt_ms + g.prefill_ms + g.decode_ms + g.down_ms,
              1e-9);
}

TEST(Generation, CloudRefusesUnsafePayloads) {
  const auto link = LinkProfile::good();
  const LinkDraw draw = draw_link(link, StageScores{});
  const auto backend = BackendModel::cloud(StageTable::reference());
  try {
    generate_cloud(sketch_of(200, false), link, draw, backend, 100, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRedactionNotApplied);
  }
  try {
    generate_cloud(sketch_of(200, true), link, draw, backend, 351, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTokenCapExceeded);
  }
  auto down = link;
  down.up = false;
  try {
    generate_cloud(sketch_of(200, true), down, draw, backend, 100, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLinkDown);
  }
  const secure::Redactor redactor(secure::RedactionPolicy::defaults());
  const secure::PayloadScanner scanner(redactor);
  auto leaky = sketch_of(200, true);
  leaky.body += " 3.14159265";
  const std::vector<double> raw = {3.14159265358979};
  CloudOptions opts;
  opts.scanner = &scanner;
  opts.raw_values = raw;
  EXPECT_THROW(generate_cloud(leaky, link, draw, backend, 100, 0, 0, opts), Error);
}

TEST(Generation, LocalQuantizationScalesTime) {
  const auto table = StageTable::reference();
  const auto edge = BackendModel::edge(table, decision::Action::kEdgeOnly);
  const auto sk = sketch_of(100, false);
  const auto full = generate_local(sk, edge, decision::QuantLevel::kFp16, 96, 0.0, 0.0);
  const auto int4 = generate_local(sk, edge, decision::QuantLevel::kInt4, 96, 0.0, 0.0);
  EXPECT_NEAR(full.prefill_ms, table.at(decision::Action::kEdgeOnly, Stage::kPrefill).median, 1e-9);
  EXPECT_NEAR(int4.ttcr_ms, 0.7 * full.ttcr_ms, 1e-9);
  EXPECT_EQ(full.text, generate_local(sk, edge, decision::QuantLevel::kFp16, 96, 1.0, 1.0).text);
  EXPECT_THROW(generate_local(sk, edge, decision::QuantLevel::kFp16, 201, 0, 0), Error);
}

TEST(LinkProfiles, OrderedAndValidated) {
  EXPECT_GT(LinkProfile::good().up_mbps, LinkProfile::moderate().up_mbps);
  EXPECT_GT(LinkProfile::moderate().up_mbps, LinkProfile::poor().up_mbps);
  EXPECT_LT(LinkProfile::good().rtt_ms, LinkProfile::poor().rtt_ms);
  EXPECT_EQ(LinkProfile::by_name("poor").name, "poor");
  EXPECT_THROW(LinkProfile::by_name("carrier-pigeon"), Error);
}

TEST(Config, RoundTripAndStrictKeys) {
  PipelineConfig c;
  c.router.theta_edge = 0.25;
  c.router.theta_esc = 0.8;
  c.link = LinkProfile::poor();
  c.tokens_out = {64, 80, 200};
  const PipelineConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.router.theta_edge, 0.25);
  EXPECT_EQ(back.router.theta_esc, 0.8);
  EXPECT_EQ(back.link.name, "poor");
  EXPECT_EQ(back.tokens_out, c.tokens_out);
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  try {
    config_from_json(R"({"router": {"theta_edg": 0.2}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
  EXPECT_THROW(config_from_json(R"({"router": {"theta_edge": 0.9, "theta_esc": 0.2}})"), Error);
  EXPECT_THROW(config_from_json("{not json"), Error);
}

struct SmallWorld {
  PipelineConfig config;
  sim::Trace trace;
  sim::World world;
};

const SmallWorld& small_world() {
  static const SmallWorld w = [] {
    PipelineConfig config;
    sim::TraceSpec spec;
    spec.duration_s = 120.0;
    spec.seed = 3;
    auto trace = sim::generate_trace(spec);
    sim::WorldSpec ws;
    ws.codebook_size = 32;
    ws.training_windows_per_topic = 4;
    ws.kmeans_iterations = 5;
    ws.docs_per_topic = 3;
    auto world = sim::build_world(trace, config, ws);
    return SmallWorld{config, std::move(trace), std::move(world)};
  }();
  return w;
}

DecisionInput input_for(const sim::TraceEvent& e, const SmallWorld& w) {
  DecisionInput in;
  in.decision_id = e.event_id;
  in.arrival_ms = e.arrival_ms;
  in.raw = sim::synthesize_window(w.config.encoder, w.trace.spec.seed, e.topic, e.window_seed);
  in.sensory_passes = e.sensory_passes;
  in.language_posterior = e.language_posterior;
  in.note = e.note;
  in.query_text = e.query;
  return in;
}

TEST(Pipeline, ForcedEscalationSendsOnlyRedactedSketch) {
  const auto& w = small_world();
  Pipeline p(w.config, w.world.codebook, w.world.index);
  const secure::Redactor redactor(w.config.redaction);
  std::size_t escalated = 0;
  for (const auto& e : w.trace.events) {
    DecisionInput in = input_for(e, w);
    in.forced = decision::Action::kEscalate;
    const auto out = p.decide(in, 11);
    if (out.action != decision::Action::kEscalate) continue;
    ++escalated;
    EXPECT_EQ(redactor.count_matches(out.escalated_payload), 0u);
    for (const auto& s : w.trace.pii) EXPECT_EQ(out.escalated_payload.find(s), std::string::npos);
    EXPECT_NEAR(out.e2e_ms, out.stages.sum(), 1e-9);
    EXPECT_NEAR(out.cost.total, out.cost.recompute_total(), 1e-12);
  }
  EXPECT_GT(escalated, 0u);
  const auto v = secure::verify_audit(p.audit().contents());
  EXPECT_TRUE(v.complete);
  EXPECT_EQ(v.valid_records, w.trace.events.size());
}

TEST(Pipeline, DecisionsAreDeterministicPerSeed) {
  const auto& w = small_world();
  Pipeline a(w.config, w.world.codebook, w.world.index);
  Pipeline b(w.config, w.world.codebook, w.world.index);
  for (std::size_t i = 0; i < std::min<std::size_t>(20, w.trace.events.size()); ++i) {
    const auto in = input_for(w.trace.events[i], w);
    const auto x = a.decide(in, 100 + i);
    const auto y = b.decide(in, 100 + i);
    EXPECT_EQ(x.action, y.action);
    EXPECT_EQ(x.text, y.text);
    EXPECT_EQ(x.e2e_ms, y.e2e_ms);
  }
  EXPECT_EQ(a.audit().contents(), b.audit().contents());
}

TEST(Rpc, HandlerMethods) {
  const auto& w = small_world();
  Pipeline p(w.config, w.world.codebook, w.world.index);
  RpcHandler h(p);
  const auto& e = w.trace.events.front();
  const auto raw = sim::synthesize_window(w.config.encoder, w.trace.spec.seed, e.topic, e.window_seed);
  json enc = {{"method", "Encode"},
              {"window_id", "w1"},
              {"steps", raw.steps},
              {"modalities", raw.modalities},
              {"channels_per_modality", raw.channels_per_modality},
              {"values", raw.values},
              {"modality_mask", raw.modality_mask}};
  const json er = json::parse(h.handle(enc.dump()));
  ASSERT_TRUE(er.at("ok").get<bool>()) << er.dump();
  EXPECT_EQ(er.at("codes").get<std::vector<std::uint32_t>>(), p.encode(raw).codes.codes);

  const json rr = json::parse(h.handle(json{{"method", "Retrieve"}, {"codes", er.at("codes")}}.dump()));
  ASSERT_TRUE(rr.at("ok").get<bool>());
  EXPECT_LE(rr.at("doc_ids").size(), w.config.retrieve_k);

  json rg = {{"method", "RouteAndGenerate"},
             {"window_id", "w1"},
             {"codes", er.at("codes")},
             {"sensory_passes", e.sensory_passes},
             {"language_posterior", e.language_posterior},
             {"action", "EdgeOnly"}};
  const json out = json::parse(h.handle(rg.dump()));
  ASSERT_TRUE(out.at("ok").get<bool>()) << out.dump();
  EXPECT_EQ(out.at("action"), "EdgeOnly");
  EXPECT_FALSE(out.at("text").get<std::string>().empty());

  EXPECT_FALSE(json::parse(h.handle("{garbage"))["ok"].get<bool>());
  EXPECT_FALSE(json::parse(h.handle(R"({"method":"Nope"})"))["ok"].get<bool>());
}

TEST(Rpc, UnixSocketRoundTrip) {
  const auto& w = small_world();
  Pipeline p(w.config, w.world.codebook, w.world.index);
  RpcHandler h(p);
  const auto path = std::filesystem::temp_directory_path() /
                    ("senseplane-rpc-" + std::to_string(::getpid()) + ".sock");
  std::atomic<bool> stop{false};
  std::thread server([&] { serve_unix(path, h, stop); });
  for (int i = 0; i < 200 && !std::filesystem::exists(path); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  {
    RpcClient client(path);
    const json r = json::parse(client.call(R"({"method":"Retrieve","codes":[1,2,3]})"));
    EXPECT_TRUE(r.at("ok").get<bool>());
    const json bad = json::parse(client.call(R"({"method":"Nope"})"));
    EXPECT_FALSE(bad.at("ok").get<bool>());
  }
  stop = true;
  server.join();
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace senseplane::runtime
