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

#include <memory>
#include <string>
#include <vector>

#include "senseplane/codec/codebook.hpp"
#include "senseplane/codec/encoder.hpp"
#include "senseplane/random.hpp"
#include "senseplane/retrieval/hybrid_index.hpp"
#include "senseplane/runtime/pipeline.hpp"
#include "senseplane/sim/trace.hpp"

namespace senseplane::sim {

inline constexpr std::size_t kMaxKnownTopics = 12;
// Topics with no corpus coverage, used for unknown events.
inline constexpr std::size_t kNovelTopics = 4;
inline constexpr std::size_t kWindowSteps = 64;

std::string topic_name(std::size_t topic);
// Keywords of the topic vocabulary, as used by corpus text and queries.
const std::vector<std::string>& topic_keywords(std::size_t topic);
std::string make_query_text(std::size_t topic, Rng& rng);

// Raw sensor window for a topic: per-channel sinusoids fixed by the world
// seed plus noise from the window seed.
codec::RawWindowRecord synthesize_window(const codec::EncoderConfig& config, std::uint64_t world_seed,
                                         std::size_t topic, std::uint64_t window_seed);

struct WorldSpec {
  std::size_t codebook_size = 128;
  std::size_t kmeans_iterations = 25;
  std::size_t training_windows_per_topic = 24;
  std::size_t docs_per_topic = 8;
  double doc_embedding_noise = 0.35;
};

// Codebook, corpus and index for a trace. Everything derives from the trace
// seed and the pipeline config, so a trace file alone rebuilds the world.
struct World {
  codec::Codebook codebook;
  std::shared_ptr<const retrieval::HybridIndex> index;
  std::vector<retrieval::Snippet> corpus;
  std::vector<std::vector<std::string>> topic_docs;  // doc ids per known topic
};

World build_world(const Trace& trace, const runtime::PipelineConfig& config, const WorldSpec& spec = {});

}  // namespace senseplane::sim
