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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace senseplane::sim {

struct TraceSpec {
  double duration_s = 8.5 * 3600.0;
  double rate_hz = 0.6;
  // K is drawn uniformly from this list.
  std::vector<std::size_t> k_values = {16};
  double known_beta_a = 2.0;
  double known_beta_b = 5.0;
  double unknown_beta_a = 5.0;
  double unknown_beta_b = 2.0;
  double unknown_fraction = 0.18;
  double duplicate_fraction = 0.0;
  std::size_t topics = 12;
  std::size_t classes = 8;
  std::size_t passes = 4;
  std::size_t streams = 1;
  // Share of events whose note carries one of the seeded PII strings.
  double pii_fraction = 0.3;
  std::size_t pii_strings = 500;
  // Optional link profile name applied to every event.
  std::string link;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TraceEvent {
  std::string event_id;
  std::int64_t arrival_ms = 0;
  std::string stream_id;
  // The raw window is synthesized from (topic, window_seed).
  std::uint64_t window_seed = 0;
  std::size_t topic = 0;
  std::size_t k = 16;
  bool unknown = false;
  bool duplicate = false;
  int label = -1;  // -1 for unknown
  double target_u = 0.0;
  std::vector<std::vector<double>> sensory_passes;
  std::vector<double> language_posterior;
  std::string note;
  std::string query;
  std::optional<std::string> link;
  // Pregenerated codes, used instead of the raw window when present.
  std::optional<std::vector<std::uint32_t>> codes;
};

struct Trace {
  TraceSpec spec;
  std::vector<std::string> pii;  // seeded PII strings, also used by the corpus
  std::vector<TraceEvent> events;
};

// Deterministic under spec.seed. Throws InvalidSpec.
Trace generate_trace(const TraceSpec& spec);

// Line-delimited JSON: one header line, then one line per event.
void write_trace(const Trace& trace, const std::filesystem::path& path);
// Throws TraceCorrupt on malformed lines or non-monotone arrivals.
Trace read_trace(const std::filesystem::path& path);
std::string trace_to_string(const Trace& trace);
Trace trace_from_string(std::string_view text);

// Posterior over `classes` with normalized entropy `u` peaked at `label`.
std::vector<double> posterior_with_entropy(double u, std::size_t classes, std::size_t label);

// The seeded PII strings: dictionary names, coordinates, identifiers and
// waveform references in a fixed mix.
std::vector<std::string> make_pii_pool(std::size_t count, std::uint64_t seed);

}  // namespace senseplane::sim
