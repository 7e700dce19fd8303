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

#include "senseplane/codec/sketch.hpp"

#include <cstdio>

#include "senseplane/codec/encoder.hpp"
#include "senseplane/error.hpp"

namespace senseplane::codec {
namespace {

constexpr std::string_view kEmptyEvidenceBlock = "[Evidence]\n";

std::string format_fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  std::string out(buf);
  if (out == "-0" || out.find_first_not_of("-0.") == std::string::npos) {
    // Normalise negative zero so equal vectors serialize identically.
    if (!out.empty() && out[0] == '-') out.erase(0, 1);
  }
  return out;
}

}  // namespace

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::kExplain: return "explain";
    case TaskKind::kAdvise: return "advise";
    case TaskKind::kAbstain: return "abstain";
  }
  return "explain";
}

TaskKind task_from_string(std::string_view name) {
  if (name == "explain") return TaskKind::kExplain;
  if (name == "advise") return TaskKind::kAdvise;
  if (name == "abstain") return TaskKind::kAbstain;
  fail(ErrorCode::kFormatError, "unknown task kind: " + std::string(name));
}

std::string escape_field(std::string_view text, std::string_view reserved) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    if (reserved.find(c) != std::string_view::npos) {
      const auto u = static_cast<unsigned char>(c);
      out += '%';
      out += kHex[u >> 4];
      out += kHex[u & 0xF];
    } else {
      out += c;
    }
  }
  return out;
}

std::size_t estimate_tokens(std::size_t bytes) { return (bytes + 3) / 4; }

std::vector<double> compress_salient(std::span<const double> vector, std::size_t dims) {
  if (dims == 0 || vector.empty()) return {};
  if (dims >= vector.size()) return {vector.begin(), vector.end()};
  std::vector<double> out(dims, 0.0);
  for (std::size_t s = 0; s < dims; ++s) {
    const auto [begin, end] = segment_bounds(s, dims, vector.size());
    for (std::size_t i = begin; i < end; ++i) out[s] += vector[i];
    out[s] /= static_cast<double>(end - begin);
  }
  return out;
}

PromptSketch serialize_sketch(const CodeSequence& sequence,
                              std::span<const std::vector<double>> salient,
                              std::span<const retrieval::ScoredSnippet> evidence, TaskKind task,
                              const SketchContext& context, const SketchLimits& limits) {
  if (sequence.codes.empty() || sequence.codes.size() > kMaxCodes) {
    fail(ErrorCode::kInvalidArgument, "code sequence must hold 1..64 codes");
  }
  if (salient.size() > kMaxSalientVectors) {
    fail(ErrorCode::kInvalidArgument, "at most 4 salient vectors may be attached");
  }

  std::string body;
  body.reserve(512);
  body += "[Context]site=";
  body += escape_field(sequence.site_id, "%\n|;[]=,:");
  body += ";t=";
  body += std::to_string(sequence.timestamp_ms);
  body += ";mods=";
  for (const bool present : sequence.modality_presence) body += present ? '1' : '0';
  body += ";conf=";
  body += format_fixed(sequence.confidence, 3);
  body += ";health=";
  body += escape_field(context.device_health, "%\n|;[]=");
  if (!context.note.empty()) {
    body += ";note=";
    body += escape_field(context.note);
  }
  body += "\n[Semantics]z=";
  for (std::size_t k = 0; k < sequence.codes.size(); ++k) {
    if (k != 0) body += ',';
    body += std::to_string(sequence.codes[k]);
  }
  body += ";h=";
  for (std::size_t i = 0; i < salient.size(); ++i) {
    if (i != 0) body += '|';
    for (std::size_t j = 0; j < salient[i].size(); ++j) {
      if (j != 0) body += ',';
      body += format_fixed(salient[i][j], limits.salient_precision);
    }
  }
  body += '\n';

  const std::size_t evidence_start = body.size();
  body += "[Evidence]";
  PromptSketch sketch;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    const auto& s = evidence[i].snippet;
    if (i != 0) body += '|';
    body += escape_field(s.doc_id, "%\n|;[]:,");
    body += ':';
    body += to_string(s.doc_type);
    body += ':';
    body += escape_field(s.text);
    sketch.doc_ids.push_back(s.doc_id);
  }
  body += '\n';
  sketch.evidence_bytes = body.size() - evidence_start;

  body += "[Task]";
  body += to_string(task);
  body += '\n';

  if (body.size() > limits.max_bytes) {
    fail(ErrorCode::kOversizeSketch, "sketch of " + std::to_string(body.size()) +
                                         " bytes exceeds cap " + std::to_string(limits.max_bytes));
  }
  const std::size_t counted =
      evidence.empty() ? body.size() - kEmptyEvidenceBlock.size() : body.size();
  sketch.token_estimate = estimate_tokens(counted);
  sketch.body = std::move(body);
  sketch.task = task;
  return sketch;
}

}  // namespace senseplane::codec
