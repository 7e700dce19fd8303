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

#include "senseplane/sim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "senseplane/error.hpp"
#include "senseplane/random.hpp"
#include "senseplane/sim/world.hpp"

namespace senseplane::sim {
namespace {

using nlohmann::ordered_json;

constexpr std::size_t kTraceVersion = 1;

double normalized_entropy(const std::vector<double>& p) {
  if (p.size() < 2) return 0.0;
  double h = 0.0;
  for (const double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h / std::log(static_cast<double>(p.size()));
}

// Two pairs of opposite perturbations keep the pass mean at `p` while making
// the passes disagree.
std::vector<std::vector<double>> make_passes(const std::vector<double>& p, std::size_t passes,
                                             std::size_t label) {
  std::vector<std::vector<double>> out(passes, p);
  if (passes < 2 || p.size() < 2) return out;
  const std::size_t other = (label + 1) % p.size();
  const double d = 0.5 * std::min(p[label], p[other]);
  for (std::size_t i = 0; i + 1 < passes; i += 2) {
    out[i][label] -= d;
    out[i][other] += d;
    out[i + 1][label] += d;
    out[i + 1][other] -= d;
  }
  return out;
}

ordered_json spec_json(const TraceSpec& s) {
  return {{"duration_s", s.duration_s},
          {"rate_hz", s.rate_hz},
          {"k_values", s.k_values},
          {"known_beta", {s.known_beta_a, s.known_beta_b}},
          {"unknown_beta", {s.unknown_beta_a, s.unknown_beta_b}},
          {"unknown_fraction", s.unknown_fraction},
          {"duplicate_fraction", s.duplicate_fraction},
          {"topics", s.topics},
          {"classes", s.classes},
          {"passes", s.passes},
          {"streams", s.streams},
          {"pii_fraction", s.pii_fraction},
          {"pii_strings", s.pii_strings},
          {"link", s.link},
          {"seed", s.seed}};
}

TraceSpec spec_from(const ordered_json& j) {
  TraceSpec s;
  s.duration_s = j.at("duration_s").get<double>();
  s.rate_hz = j.at("rate_hz").get<double>();
  s.k_values = j.at("k_values").get<std::vector<std::size_t>>();
  s.known_beta_a = j.at("known_beta").at(0).get<double>();
  s.known_beta_b = j.at("known_beta").at(1).get<double>();
  s.unknown_beta_a = j.at("unknown_beta").at(0).get<double>();
  s.unknown_beta_b = j.at("unknown_beta").at(1).get<double>();
  s.unknown_fraction = j.at("unknown_fraction").get<double>();
  s.duplicate_fraction = j.at("duplicate_fraction").get<double>();
  s.topics = j.at("topics").get<std::size_t>();
  s.classes = j.at("classes").get<std::size_t>();
  s.passes = j.at("passes").get<std::size_t>();
  s.streams = j.at("streams").get<std::size_t>();
  s.pii_fraction = j.at("pii_fraction").get<double>();
  s.pii_strings = j.at("pii_strings").get<std::size_t>();
  s.link = j.at("link").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

ordered_json event_json(const TraceEvent& e) {
  ordered_json j = {{"event_id", e.event_id},
                    {"arrival_ms", e.arrival_ms},
                    {"stream_id", e.stream_id},
                    {"window_seed", e.window_seed},
                    {"topic", e.topic},
                    {"k", e.k},
                    {"unknown", e.unknown},
                    {"duplicate", e.duplicate},
                    {"label", e.label},
                    {"target_u", e.target_u},
                    {"sensory_passes", e.sensory_passes},
                    {"language_posterior", e.language_posterior},
                    {"note", e.note},
                    {"query", e.query}};
  if (e.link) j["link"] = *e.link;
  if (e.codes) j["codes"] = *e.codes;
  return j;
}

TraceEvent event_from(const ordered_json& j) {
  TraceEvent e;
  e.event_id = j.at("event_id").get<std::string>();
  e.arrival_ms = j.at("arrival_ms").get<std::int64_t>();
  e.stream_id = j.at("stream_id").get<std::string>();
  e.window_seed = j.at("window_seed").get<std::uint64_t>();
  e.topic = j.at("topic").get<std::size_t>();
  e.k = j.at("k").get<std::size_t>();
  e.unknown = j.at("unknown").get<bool>();
  e.duplicate = j.at("duplicate").get<bool>();
  e.label = j.at("label").get<int>();
  e.target_u = j.at("target_u").get<double>();
  e.sensory_passes = j.at("sensory_passes").get<std::vector<std::vector<double>>>();
  e.language_posterior = j.at("language_posterior").get<std::vector<double>>();
  e.note = j.at("note").get<std::string>();
  e.query = j.at("query").get<std::string>();
  if (j.contains("link")) e.link = j.at("link").get<std::string>();
  if (j.contains("codes")) e.codes = j.at("codes").get<std::vector<std::uint32_t>>();
  return e;
}

std::string hex_string(Rng& rng, std::size_t digits) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < digits; ++i) s += kHex[rng.index(16)];
  return s;
}

}  // namespace

void TraceSpec::validate() const {
  const auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidSpec, what); };
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) bad("duration must be finite and >= 0");
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) bad("arrival rate must be positive");
  if (k_values.empty()) bad("K distribution is empty");
  for (const auto k : k_values) {
    if (k == 0 || k > 64) bad("K values must be within 1..64");
  }
  for (const double b : {known_beta_a, known_beta_b, unknown_beta_a, unknown_beta_b}) {
    if (!(b > 0.0)) bad("beta parameters must be positive");
  }
  for (const double f : {unknown_fraction, duplicate_fraction, pii_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) bad("fractions must be within [0,1]");
  }
  if (topics == 0) bad("at least one topic is required");
  if (topics > kMaxKnownTopics) bad("too many topics");
  if (classes < 2) bad("at least two classes are required");
  if (passes == 0 || passes > 8) bad("passes must be within 1..8");
  if (streams == 0) bad("at least one stream is required");
  if (pii_fraction > 0.0 && pii_strings == 0) bad("pii_fraction needs pii strings");
}

std::vector<double> posterior_with_entropy(double u, std::size_t classes, std::size_t label) {
  if (classes < 2 || label >= classes) fail(ErrorCode::kInvalidArgument, "bad posterior shape");
  u = std::clamp(u, 0.0, 1.0);
  const auto mix = [&](double w) {
    std::vector<double> p(classes, w / static_cast<double>(classes));
    p[label] += 1.0 - w;
    return p;
  };
  // Entropy of the one-hot/uniform mixture is increasing in the weight.
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (normalized_entropy(mix(mid)) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mix(0.5 * (lo + hi));
}

std::vector<std::string> make_pii_pool(std::size_t count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "pii"));
  static const std::vector<std::string> kNames = {
      "Alice", "Amara", "Bruno", "Carlos", "Chen", "Dmitri", "Elena", "Fatima", "Grace",
      "Hiro",  "Ines",  "John",  "Kofi",   "Laila", "Maria", "Mateo", "Nadia", "Omar",
      "Priya", "Rosa",  "Sven",  "Tariq",  "Uma",  "Viktor", "Wei",   "Yusuf", "Zara"};
  static const std::vector<std::string> kIdPrefixes = {"MRN-", "SSN:", "BADGE#", "PID", "ACC-"};
  std::vector<std::string> out;
  std::set<std::string> seen;
  const auto push = [&](std::string s) {
    if (out.size() < count && seen.insert(s).second) out.push_back(std::move(s));
  };
  for (const auto& n : kNames) push(n);
  char buf[96];
  while (out.size() < count) {
    switch (out.size() % 7) {
      case 0:
        std::snprintf(buf, sizeof(buf), "%.5f,%.5f", rng.uniform(-80.0, 80.0), rng.uniform(-170.0, 170.0));
        push(buf);
        break;
      case 1:
        push(kIdPrefixes[rng.index(kIdPrefixes.size())] + std::to_string(1000 + rng.index(9000000)));
        break;
      case 2:
        std::snprintf(buf, sizeof(buf), "%03zu-%03zu-%04zu", 200 + rng.index(700), 100 + rng.index(900),
                      rng.index(10000));
        push(buf);
        break;
      case 3:
        push("resident" + std::to_string(rng.index(100000)) + "@carehome.example");
        break;
      case 4: {
        std::string mac;
        for (int i = 0; i < 6; ++i) mac += (i ? ":" : "") + hex_string(rng, 2);
        push(mac);
        break;
      }
      case 5:
        push(std::string(rng.bernoulli(0.5) ? "csi_" : "wav-") + hex_string(rng, 12));
        break;
      default:
        push("sha256:" + hex_string(rng, 24));
        break;
    }
  }
  return out;
}

Trace generate_trace(const TraceSpec& spec) {
  spec.validate();
  Trace trace;
  trace.spec = spec;
  trace.pii = make_pii_pool(spec.pii_strings, spec.seed);
  Rng rng(derive_seed(spec.seed, "trace"));
  const double duration_ms = spec.duration_s * 1000.0;
  double t = 0.0;
  std::size_t index = 0;
  for (;;) {
    t += rng.exponential(spec.rate_hz) * 1000.0;
    if (t > duration_ms) break;
    TraceEvent e;
    const auto arrival = static_cast<std::int64_t>(std::floor(t));
    e.arrival_ms = arrival;
    e.stream_id = "stream-" + std::to_string(rng.index(spec.streams));
    char id[32];
    std::snprintf(id, sizeof(id), "ev-%07zu", index);
    e.event_id = id;
    const bool dup = !trace.events.empty() && rng.bernoulli(spec.duplicate_fraction);
    // Draws below happen for every event so the stream does not depend on
    // the duplicate decision.
    const bool unknown = rng.bernoulli(spec.unknown_fraction);
    const double u = unknown ? rng.beta(spec.unknown_beta_a, spec.unknown_beta_b)
                             : rng.beta(spec.known_beta_a, spec.known_beta_b);
    const std::size_t label = rng.index(spec.classes);
    const std::uint64_t window_seed = rng.engine()();
    const std::size_t k = spec.k_values[rng.index(spec.k_values.size())];
    const std::size_t topic = unknown ? spec.topics + rng.index(kNovelTopics) : rng.index(spec.topics);
    const bool with_pii = rng.bernoulli(spec.pii_fraction);
    const std::size_t pii_a = trace.pii.empty() ? 0 : rng.index(trace.pii.size());
    const std::size_t pii_b = trace.pii.empty() ? 0 : rng.index(trace.pii.size());
    const std::uint64_t query_seed = rng.engine()();
    if (dup) {
      const TraceEvent& prev = trace.events.back();
      e.window_seed = prev.window_seed;
      e.topic = prev.topic;
      e.k = prev.k;
      e.unknown = prev.unknown;
      e.label = prev.label;
      e.target_u = prev.target_u;
      e.sensory_passes = prev.sensory_passes;
      e.language_posterior = prev.language_posterior;
      e.note = prev.note;
      e.query = prev.query;
      e.stream_id = prev.stream_id;
      e.duplicate = true;
    } else {
      e.window_seed = window_seed;
      e.topic = topic;
      e.k = k;
      e.unknown = unknown;
      e.label = unknown ? -1 : static_cast<int>(label);
      e.target_u = u;
      const auto p = posterior_with_entropy(u, spec.classes, label);
      e.sensory_passes = make_passes(p, spec.passes, label);
      e.language_posterior = p;
      Rng qrng(query_seed);
      e.query = make_query_text(e.topic, qrng);
      e.note = "obs " + topic_name(e.topic);
      if (with_pii && !trace.pii.empty()) {
        e.note += " near " + trace.pii[pii_a] + " ref " + trace.pii[pii_b];
      }
    }
    if (!spec.link.empty()) e.link = spec.link;
    trace.events.push_back(std::move(e));
    ++index;
  }
  return trace;
}

std::string trace_to_string(const Trace& trace) {
  std::string out;
  ordered_json header = {{"type", "header"},
                         {"format", "senseplane-trace"},
                         {"version", kTraceVersion},
                         {"spec", spec_json(trace.spec)},
                         {"pii", trace.pii},
                         {"events", trace.events.size()}};
  out += header.dump();
  out += '\n';
  for (const auto& e : trace.events) {
    ordered_json j = event_json(e);
    j["type"] = "event";
    out += j.dump();
    out += '\n';
  }
  return out;
}

Trace trace_from_string(std::string_view text) {
  Trace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::size_t expected = 0;
  bool have_header = false;
  const auto corrupt = [&](const std::string& what) {
    fail(ErrorCode::kTraceCorrupt, "trace line " + std::to_string(lineno) + ": " + what);
  };
  std::map<std::string, std::int64_t> last_arrival;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception&) {
      corrupt("not valid JSON");
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header" || j.at("format").get<std::string>() != "senseplane-trace") corrupt("missing header");
        if (j.at("version").get<std::size_t>() != kTraceVersion) corrupt("unsupported version");
        trace.spec = spec_from(j.at("spec"));
        trace.pii = j.at("pii").get<std::vector<std::string>>();
        expected = j.at("events").get<std::size_t>();
        have_header = true;
        continue;
      }
      if (type != "event") corrupt("unexpected record type " + type);
      TraceEvent e = event_from(j);
      auto [it, fresh] = last_arrival.emplace(e.stream_id, e.arrival_ms);
      if (!fresh) {
        if (e.arrival_ms < it->second) corrupt("arrivals regress within stream " + e.stream_id);
        it->second = e.arrival_ms;
      }
      trace.events.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      corrupt(std::string("bad field: ") + e.what());
    }
  }
  if (!have_header) fail(ErrorCode::kTraceCorrupt, "trace has no header");
  if (trace.events.size() != expected) {
    fail(ErrorCode::kTraceCorrupt, "trace holds " + std::to_string(trace.events.size()) + " events, header says " +
                                       std::to_string(expected));
  }
  try {
    trace.spec.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kTraceCorrupt, std::string("trace header: ") + e.what());
  }
  return trace;
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write trace " + path.string());
  out << trace_to_string(trace);
  if (!out) fail(ErrorCode::kIoError, "short write to " + path.string());
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read trace " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return trace_from_string(ss.str());
}

}  // namespace senseplane::sim
