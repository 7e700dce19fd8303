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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "senseplane/retrieval/snippet.hpp"

namespace senseplane::retrieval {

// Embeddings travel as base64 of little-endian float32.
std::string encode_embedding(std::span<const float> embedding);
std::vector<float> decode_embedding(std::string_view text);

// One JSON object per line:
// {"doc_id", "text", "doc_type", "entity_tags", "embedding"[, "abstracted"]}
std::string snippet_to_json_line(const Snippet& snippet);
Snippet snippet_from_json_line(std::string_view line);

std::vector<Snippet> read_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, std::span<const Snippet> snippets);

}  // namespace senseplane::retrieval
