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

#include "senseplane/retrieval/corpus_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include "json.hpp"
#include "senseplane/digest.hpp"
#include "senseplane/error.hpp"

namespace senseplane::retrieval {

using nlohmann::json;

std::string encode_embedding(std::span<const float> embedding) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(embedding.size() * 4);
  for (const float v : embedding) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return base64_encode(bytes);
}

std::vector<float> decode_embedding(std::string_view text) {
  const std::vector<std::uint8_t> bytes = base64_decode(text);
  if (bytes.size() % 4 != 0) fail(ErrorCode::kFormatError, "embedding byte length not a multiple of 4");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

std::string snippet_to_json_line(const Snippet& snippet) {
  json j = {{"doc_id", snippet.doc_id},
            {"text", snippet.text},
            {"doc_type", std::string(to_string(snippet.doc_type))},
            {"entity_tags", snippet.entity_tags},
            {"embedding", encode_embedding(snippet.embedding)}};
  if (snippet.abstracted) j["abstracted"] = true;
  return j.dump();
}

Snippet snippet_from_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    Snippet s;
    s.doc_id = j.at("doc_id").get<std::string>();
    s.text = j.at("text").get<std::string>();
    s.doc_type = doc_type_from_string(j.at("doc_type").get<std::string>());
    if (j.contains("entity_tags")) s.entity_tags = j.at("entity_tags").get<std::vector<std::string>>();
    s.embedding = decode_embedding(j.at("embedding").get<std::string>());
    s.abstracted = j.value("abstracted", false);
    return s;
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("corpus record malformed: ") + e.what());
  }
}

std::vector<Snippet> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open corpus " + path.string());
  std::vector<Snippet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(snippet_from_json_line(line));
    } catch (const Error& e) {
      fail(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, std::span<const Snippet> snippets) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write corpus " + path.string());
  for (const Snippet& s : snippets) out << snippet_to_json_line(s) << '\n';
  if (!out) fail(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace senseplane::retrieval
