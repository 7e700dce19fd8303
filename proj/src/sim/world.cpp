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

#include "senseplane/sim/world.hpp"

#include <cmath>
#include <numbers>

#include "senseplane/codec/quantizer.hpp"
#include "senseplane/error.hpp"

namespace senseplane::sim {
namespace {

struct TopicVocabulary {
  const char* name;
  std::vector<std::string> keywords;
};

const std::vector<TopicVocabulary>& vocabulary() {
  static const std::vector<TopicVocabulary> kTopics = {
      {"fall", {"fall", "hallway", "floor", "impact"}},
      {"wandering", {"wandering", "exit", "corridor", "nighttime"}},
      {"cooking", {"stove", "kitchen", "burner", "cooking"}},
      {"sleep", {"sleep", "bed", "restless", "mattress"}},
      {"medication", {"medication", "pill", "dispenser", "dose"}},
      {"door", {"door", "entry", "chime", "threshold"}},
      {"bathing", {"bathroom", "shower", "water", "slip"}},
      {"exercise", {"exercise", "walking", "gait", "therapy"}},
      {"visitor", {"visitor", "lounge", "guest", "signin"}},
      {"appliance", {"appliance", "fridge", "heater", "socket"}},
      {"breathing", {"breathing", "cough", "respiration", "wheeze"}},
      {"heating", {"heating", "thermostat", "temperature", "radiator"}},
      // Novel topics: no corpus documents use these words.
      {"novel-a", {"glimmer", "quarrel", "vortex", "ember"}},
      {"novel-b", {"lattice", "murmur", "pylon", "drift"}},
      {"novel-c", {"sprocket", "tundra", "cipher", "hollow"}},
      {"novel-d", {"marble", "fathom", "gusset", "prism"}},
  };
  return kTopics;
}

const TopicVocabulary& topic_entry(std::size_t topic) {
  const auto& v = vocabulary();
  if (topic >= v.size()) fail(ErrorCode::kInvalidArgument, "topic out of range");
  return v[topic];
}

std::vector<float> unit_noise_mix(const std::vector<float>& base, double noise, Rng& rng) {
  std::vector<double> v(base.size());
  double n2 = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    v[i] = base[i] + noise * rng.normal() / std::sqrt(static_cast<double>(base.size()));
    n2 += v[i] * v[i];
  }
  const double n = std::sqrt(n2);
  std::vector<float> out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = static_cast<float>(v[i] / n);
  double f2 = 0.0;
  for (const float x : out) f2 += static_cast<double>(x) * x;
  const double f = std::sqrt(f2);
  for (float& x : out) x = static_cast<float>(x / f);
  return out;
}

}  // namespace

std::string topic_name(std::size_t topic) { return topic_entry(topic).name; }

const std::vector<std::string>& topic_keywords(std::size_t topic) { return topic_entry(topic).keywords; }

std::string make_query_text(std::size_t topic, Rng& rng) {
  const auto& kw = topic_keywords(topic);
  const std::size_t a = rng.index(kw.size());
  std::size_t b = rng.index(kw.size() - 1);
  if (b >= a) ++b;
  return "what happened with the " + kw[a] + " and " + kw[b];
}

codec::RawWindowRecord synthesize_window(const codec::EncoderConfig& config, std::uint64_t world_seed,
                                         std::size_t topic, std::uint64_t window_seed) {
  const std::size_t width = config.modalities * config.channels_per_modality;
  Rng shape(derive_seed(derive_seed(world_seed, "topic-shape"), topic));
  std::vector<double> amp(width), freq(width), phase(width), offset(width);
  for (std::size_t c = 0; c < width; ++c) {
    amp[c] = shape.uniform(0.5, 2.0);
    freq[c] = static_cast<double>(1 + shape.index(4));
    phase[c] = shape.uniform(0.0, 2.0 * std::numbers::pi);
    offset[c] = 0.3 * shape.normal();
  }
  Rng rng(window_seed);
  // Windows start at a random point of the topic's cycle.
  const double shift = rng.uniform(0.0, static_cast<double>(kWindowSteps));
  const double gain = rng.uniform(0.8, 1.2);
  codec::RawWindowRecord raw;
  raw.steps = kWindowSteps;
  raw.modalities = config.modalities;
  raw.channels_per_modality = config.channels_per_modality;
  raw.site_id = "site-1";
  raw.modality_mask.assign(config.modalities, true);
  if (config.modalities > 1 && rng.bernoulli(0.05)) raw.modality_mask[rng.index(config.modalities)] = false;
  raw.values.resize(kWindowSteps * width);
  for (std::size_t t = 0; t < kWindowSteps; ++t) {
    for (std::size_t c = 0; c < width; ++c) {
      const bool present = raw.modality_mask[c / config.channels_per_modality];
      const double s = offset[c] + gain * amp[c] * std::sin(2.0 * std::numbers::pi * freq[c] * (t + shift) / kWindowSteps + phase[c]) +
                       1.0 * rng.normal();
      raw.values[t * width + c] = present ? s : 0.0;
    }
  }
  return raw;
}

World build_world(const Trace& trace, const runtime::PipelineConfig& config, const WorldSpec& spec) {
  const std::uint64_t seed = trace.spec.seed;
  const std::size_t known = trace.spec.topics;
  const codec::WindowEncoder encoder(config.encoder);

  // Codebook from k-means over pooled segments of training windows from
  // every topic, novel ones included: the codec is topic-agnostic.
  std::vector<std::vector<double>> pool;
  std::vector<std::vector<std::vector<std::uint32_t>>> topic_codes(known + kNovelTopics);
  std::vector<codec::FeatureWindow> windows;
  std::vector<std::size_t> window_topic;
  for (std::size_t t = 0; t < known + kNovelTopics; ++t) {
    for (std::size_t i = 0; i < spec.training_windows_per_topic; ++i) {
      const auto raw = synthesize_window(config.encoder, seed, t, derive_seed(derive_seed(seed, "train"), t * 1000 + i));
      windows.push_back(encoder.encode(raw));
      window_topic.push_back(t);
      for (std::size_t l = 0; l < windows.back().features.rows(); ++l) {
        const auto row = windows.back().features.row(l);
        pool.emplace_back(row.begin(), row.end());
      }
    }
  }
  codec::Codebook codebook = codec::kmeans_init(pool, spec.codebook_size, spec.kmeans_iterations,
                                                derive_seed(seed, "kmeans"));
  double dist = 0.0;
  std::size_t count = 0;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto q = codec::quantize(windows[w], codebook, config.codes_per_window);
    for (const double d : q.distances) dist += d;
    count += q.distances.size();
    topic_codes[window_topic[w]].push_back(q.sequence.codes);
  }
  codebook.set_distance_scale(count ? std::max(dist / static_cast<double>(count), 1e-9) : 1.0);

  const runtime::CodeEmbedder embedder(codebook.size(), config.retrieval.embedding_dim, config.seed);
  World world{codebook, nullptr, {}, std::vector<std::vector<std::string>>(known)};
  auto index = std::make_shared<retrieval::HybridIndex>(config.retrieval);
  Rng rng(derive_seed(seed, "corpus"));
  const auto& pii = trace.pii;
  const auto pick_pii = [&](std::size_t offset) -> std::string {
    if (pii.empty()) return "the resident";
    return pii[(offset * 7919 + rng.index(pii.size())) % pii.size()];
  };
  std::size_t doc_counter = 0;
  for (std::size_t t = 0; t < known; ++t) {
    // Topic centroid in query space: mean embedding of training code sequences.
    std::vector<float> centroid(config.retrieval.embedding_dim, 0.0f);
    for (const auto& codes : topic_codes[t]) {
      const auto e = embedder.embed(codes);
      for (std::size_t i = 0; i < centroid.size(); ++i) centroid[i] += e[i];
    }
    double cn = 0.0;
    for (const float x : centroid) cn += static_cast<double>(x) * x;
    cn = std::sqrt(cn);
    for (float& x : centroid) x = cn > 0.0 ? static_cast<float>(x / cn) : 0.0f;
    const auto& kw = topic_keywords(t);
    const std::string name = topic_name(t);
    const std::vector<std::pair<retrieval::DocType, std::string>> docs = {
        {retrieval::DocType::kPolicy,
         "Policy on " + name + ": staff respond to " + kw[0] + " events within five minutes and log the " + kw[1] +
             " check."},
        {retrieval::DocType::kPolicy, "Residents may use the " + kw[2] + " without supervision."},
        {retrieval::DocType::kPolicy, "Residents may not use the " + kw[2] + " without supervision."},
        {retrieval::DocType::kManual,
         "Manual for " + kw[1] + ": inspect the " + kw[2] + " sensor weekly and record " + kw[3] + " readings."},
        {retrieval::DocType::kManual, "Manual: reset the " + kw[0] + " monitor if " + kw[3] + " alerts repeat."},
        {retrieval::DocType::kNote,
         "Note: " + pick_pii(t) + " reported a " + kw[0] + " concern near the " + kw[1] + ", contact " +
             pick_pii(t + 1) + "."},
        {retrieval::DocType::kNote, "Note: night shift saw a " + kw[3] + " pattern by the " + kw[2] + "."},
        {retrieval::DocType::kMap, "Map: the " + kw[1] + " zone sits at " + pick_pii(t + 2) + " in wing " +
                                       std::string(1, static_cast<char>('A' + t % 26)) + "."},
    };
    for (std::size_t d = 0; d < std::min(spec.docs_per_topic, docs.size()); ++d) {
      retrieval::Snippet s;
      char id[32];
      std::snprintf(id, sizeof(id), "doc-%04zu", doc_counter++);
      s.doc_id = id;
      s.doc_type = docs[d].first;
      s.text = docs[d].second;
      s.entity_tags = {name};
      s.embedding = unit_noise_mix(centroid, spec.doc_embedding_noise, rng);
      world.topic_docs[t].push_back(s.doc_id);
      index->add(s);
      world.corpus.push_back(std::move(s));
    }
  }
  world.index = std::move(index);
  return world;
}

}  // namespace senseplane::sim
