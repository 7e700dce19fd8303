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

#include "senseplane/runtime/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "senseplane/error.hpp"

namespace senseplane::runtime {
namespace {

using nlohmann::ordered_json;

// Reads fields out of one JSON object and remembers which keys were used.
class Section {
 public:
  Section(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::kConfigError, path_ + " must be an object");
  }
  ~Section() = default;

  template <typename T>
  void read(const char* key, T& out) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (it->is_null()) {
          out = std::numeric_limits<double>::infinity();
          return;
        }
      }
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::kConfigError, path_ + "." + key + " has the wrong type");
    }
  }

  bool has(const char* key) {
    used_.insert(key);
    return j_.contains(key);
  }
  const ordered_json& at(const char* key) const { return j_.at(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) fail(ErrorCode::kConfigError, "unknown config key " + path_ + "." + k);
    }
  }

 private:
  const ordered_json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); }

ordered_json link_json(const LinkProfile& l) {
  return {{"name", l.name},
          {"down_mbps", l.down_mbps},
          {"up_mbps", l.up_mbps},
          {"rtt_ms", l.rtt_ms},
          {"jitter_sigma", l.jitter_sigma},
          {"burst_probability", l.burst_probability},
          {"burst_capacity", l.burst_capacity},
          {"up", l.up}};
}

LinkProfile link_from(const ordered_json& j, const std::string& path) {
  if (j.is_string()) return LinkProfile::by_name(j.get<std::string>());
  LinkProfile l;
  Section s(j, path);
  if (s.has("name") && j.at("name").is_string()) {
    // A preset name seeds the remaining fields.
    const auto name = j.at("name").get<std::string>();
    if (name == "good" || name == "moderate" || name == "poor") l = LinkProfile::by_name(name);
  }
  s.read("name", l.name);
  s.read("down_mbps", l.down_mbps);
  s.read("up_mbps", l.up_mbps);
  s.read("rtt_ms", l.rtt_ms);
  s.read("jitter_sigma", l.jitter_sigma);
  s.read("burst_probability", l.burst_probability);
  s.read("burst_capacity", l.burst_capacity);
  s.read("up", l.up);
  s.finish();
  return l;
}

constexpr std::array<decision::Action, 3> kServing = decision::kServingActions;

ordered_json stages_json(const StageTable& t) {
  ordered_json out = {{"correlation", t.correlation}};
  for (const auto a : kServing) {
    ordered_json row = ordered_json::object();
    for (std::size_t s = 0; s < kStageCount; ++s) {
      const auto& st = t.at(a, static_cast<Stage>(s));
      row[std::string(to_string(static_cast<Stage>(s)))] = {st.median, st.p95};
    }
    out[std::string(decision::to_string(a))] = std::move(row);
  }
  return out;
}

StageTable stages_from(const ordered_json& j, StageTable t) {
  Section s(j, "stages");
  s.read("correlation", t.correlation);
  for (const auto a : kServing) {
    const std::string name(decision::to_string(a));
    if (!s.has(name.c_str())) continue;
    Section row(s.at(name.c_str()), "stages." + name);
    for (std::size_t i = 0; i < kStageCount; ++i) {
      const std::string stage(to_string(static_cast<Stage>(i)));
      std::array<double, 2> pair{t.at(a, static_cast<Stage>(i)).median, t.at(a, static_cast<Stage>(i)).p95};
      row.read(stage.c_str(), pair);
      if (pair[0] < 0.0 || pair[1] < pair[0]) {
        fail(ErrorCode::kConfigError, "stage " + name + "." + stage + " needs 0 <= median <= p95");
      }
      t.at(a, static_cast<Stage>(i)) = {pair[0], pair[1]};
    }
    row.finish();
  }
  s.finish();
  return t;
}

}  // namespace

std::string config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["codes_per_window"] = c.codes_per_window;
  j["retrieve_k"] = c.retrieve_k;
  j["retrieval_cache_capacity"] = c.retrieval_cache_capacity;
  j["eta"] = c.eta;
  j["slo_ms"] = c.slo_ms;
  j["header_bytes"] = c.header_bytes;
  j["battery_j"] = finite_or_null(c.battery_j);
  j["semantic_cache_enabled"] = c.semantic_cache_enabled;
  j["tokens_out"] = {{"EdgeOnly", c.tokens_out[0]}, {"EdgeRag", c.tokens_out[1]}, {"Escalate", c.tokens_out[2]}};
  j["encoder"] = {{"modalities", c.encoder.modalities},
                  {"channels_per_modality", c.encoder.channels_per_modality},
                  {"latent_dim", c.encoder.latent_dim},
                  {"latent_frames", c.encoder.latent_frames},
                  {"seed", c.encoder.seed}};
  const auto& r = c.retrieval;
  j["retrieval"] = {{"hnsw_m", r.hnsw_m},       {"ef_construction", r.ef_construction},
                    {"ef_query", r.ef_query},   {"embedding_dim", r.embedding_dim},
                    {"bm25_k1", r.bm25_k1},     {"bm25_b", r.bm25_b},
                    {"lambda", r.lambda},       {"kappa", r.kappa},
                    {"k_max", r.k_max},         {"exact_scan_limit", r.exact_scan_limit},
                    {"full_pool_limit", r.full_pool_limit}, {"seed", r.seed}};
  j["weights"] = {{"alpha", c.weights.alpha}, {"beta", c.weights.beta}, {"gamma", c.weights.gamma},
                  {"delta", c.weights.delta}};
  j["router"] = {{"theta_edge", c.router.theta_edge},         {"theta_esc", c.router.theta_esc},
                 {"rho", c.router.rho},                       {"energy_floor_j", c.router.energy_floor_j},
                 {"edge_token_cap", c.router.edge_token_cap}, {"cloud_token_cap", c.router.cloud_token_cap}};
  j["predictor"] = {{"ridge_strength", c.predictor.ridge_strength},
                    {"refit_every", c.predictor.refit_every},
                    {"window", c.predictor.window},
                    {"min_samples", c.predictor.min_samples}};
  j["link"] = link_json(c.link);
  j["stages"] = stages_json(c.stages);
  j["scheduler"] = {{"batch_window_ms", c.scheduler.batch_window_ms}, {"max_batch", c.scheduler.max_batch}};
  j["downshift"] = {{"high_water", c.downshift.high_water},
                    {"low_water", c.downshift.low_water},
                    {"hold_ticks", c.downshift.hold_ticks}};
  j["semantic_cache"] = {{"capacity", c.semantic_cache.capacity},
                         {"max_age_ms", c.semantic_cache.max_age_ms},
                         {"hit_cost_ms", c.semantic_cache.hit_cost_ms}};
  j["power"] = {{"encode_w", c.power.encode_w}, {"retrieval_w", c.power.retrieval_w},
                {"routing_w", c.power.routing_w}, {"post_w", c.power.post_w}, {"idle_w", c.power.idle_w}};
  const auto& p = c.redaction;
  j["redaction"] = {{"name_dictionary", p.name_dictionary},
                    {"coordinate_patterns", p.coordinate_patterns},
                    {"identifier_patterns", p.identifier_patterns},
                    {"waveform_patterns", p.waveform_patterns},
                    {"whitelist", p.whitelist},
                    {"alias_key", p.alias_key}};
  j["guard"] = {{"forbidden_topics", c.guard.forbidden_topics},
                {"unsafe_verbs", c.guard.unsafe_verbs},
                {"protected_objects", c.guard.protected_objects}};
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  Section top(j, "config");
  top.read("seed", c.seed);
  top.read("codes_per_window", c.codes_per_window);
  top.read("retrieve_k", c.retrieve_k);
  top.read("retrieval_cache_capacity", c.retrieval_cache_capacity);
  top.read("eta", c.eta);
  top.read("slo_ms", c.slo_ms);
  top.read("header_bytes", c.header_bytes);
  top.read("battery_j", c.battery_j);
  top.read("semantic_cache_enabled", c.semantic_cache_enabled);
  if (top.has("tokens_out")) {
    Section s(top.at("tokens_out"), "tokens_out");
    s.read("EdgeOnly", c.tokens_out[0]);
    s.read("EdgeRag", c.tokens_out[1]);
    s.read("Escalate", c.tokens_out[2]);
    s.finish();
  }
  if (top.has("encoder")) {
    Section s(top.at("encoder"), "encoder");
    s.read("modalities", c.encoder.modalities);
    s.read("channels_per_modality", c.encoder.channels_per_modality);
    s.read("latent_dim", c.encoder.latent_dim);
    s.read("latent_frames", c.encoder.latent_frames);
    s.read("seed", c.encoder.seed);
    s.finish();
  }
  if (top.has("retrieval")) {
    auto& r = c.retrieval;
    Section s(top.at("retrieval"), "retrieval");
    s.read("hnsw_m", r.hnsw_m);
    s.read("ef_construction", r.ef_construction);
    s.read("ef_query", r.ef_query);
    s.read("embedding_dim", r.embedding_dim);
    s.read("bm25_k1", r.bm25_k1);
    s.read("bm25_b", r.bm25_b);
    s.read("lambda", r.lambda);
    s.read("kappa", r.kappa);
    s.read("k_max", r.k_max);
    s.read("exact_scan_limit", r.exact_scan_limit);
    s.read("full_pool_limit", r.full_pool_limit);
    s.read("seed", r.seed);
    s.finish();
  }
  if (top.has("weights")) {
    Section s(top.at("weights"), "weights");
    s.read("alpha", c.weights.alpha);
    s.read("beta", c.weights.beta);
    s.read("gamma", c.weights.gamma);
    s.read("delta", c.weights.delta);
    s.finish();
  }
  if (top.has("router")) {
    Section s(top.at("router"), "router");
    s.read("theta_edge", c.router.theta_edge);
    s.read("theta_esc", c.router.theta_esc);
    s.read("rho", c.router.rho);
    s.read("energy_floor_j", c.router.energy_floor_j);
    s.read("edge_token_cap", c.router.edge_token_cap);
    s.read("cloud_token_cap", c.router.cloud_token_cap);
    s.finish();
  }
  if (top.has("predictor")) {
    Section s(top.at("predictor"), "predictor");
    s.read("ridge_strength", c.predictor.ridge_strength);
    s.read("refit_every", c.predictor.refit_every);
    s.read("window", c.predictor.window);
    s.read("min_samples", c.predictor.min_samples);
    s.finish();
  }
  if (top.has("link")) c.link = link_from(top.at("link"), "link");
  if (top.has("stages")) c.stages = stages_from(top.at("stages"), c.stages);
  if (top.has("scheduler")) {
    Section s(top.at("scheduler"), "scheduler");
    s.read("batch_window_ms", c.scheduler.batch_window_ms);
    s.read("max_batch", c.scheduler.max_batch);
    s.finish();
  }
  if (top.has("downshift")) {
    Section s(top.at("downshift"), "downshift");
    s.read("high_water", c.downshift.high_water);
    s.read("low_water", c.downshift.low_water);
    s.read("hold_ticks", c.downshift.hold_ticks);
    s.finish();
  }
  if (top.has("semantic_cache")) {
    Section s(top.at("semantic_cache"), "semantic_cache");
    s.read("capacity", c.semantic_cache.capacity);
    s.read("max_age_ms", c.semantic_cache.max_age_ms);
    s.read("hit_cost_ms", c.semantic_cache.hit_cost_ms);
    s.finish();
  }
  if (top.has("power")) {
    Section s(top.at("power"), "power");
    s.read("encode_w", c.power.encode_w);
    s.read("retrieval_w", c.power.retrieval_w);
    s.read("routing_w", c.power.routing_w);
    s.read("post_w", c.power.post_w);
    s.read("idle_w", c.power.idle_w);
    s.finish();
  }
  if (top.has("redaction")) {
    auto& p = c.redaction;
    Section s(top.at("redaction"), "redaction");
    s.read("name_dictionary", p.name_dictionary);
    s.read("coordinate_patterns", p.coordinate_patterns);
    s.read("identifier_patterns", p.identifier_patterns);
    s.read("waveform_patterns", p.waveform_patterns);
    s.read("whitelist", p.whitelist);
    s.read("alias_key", p.alias_key);
    s.finish();
  }
  if (top.has("guard")) {
    Section s(top.at("guard"), "guard");
    s.read("forbidden_topics", c.guard.forbidden_topics);
    s.read("unsafe_verbs", c.guard.unsafe_verbs);
    s.read("protected_objects", c.guard.protected_objects);
    s.finish();
  }
  top.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    fail(ErrorCode::kConfigError, e.what());
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfigError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const PipelineConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot write config " + path.string());
  out << config_to_json(config);
  if (!out) fail(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace senseplane::runtime
