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

#include "senseplane/runtime/backend.hpp"

#include <cstdio>

#include "senseplane/digest.hpp"
#include "senseplane/error.hpp"

namespace senseplane::runtime {
namespace {

void check_caps(const codec::PromptSketch& sketch, const BackendModel& backend, std::size_t tokens_out) {
  if (tokens_out > backend.token_cap) {
    fail(ErrorCode::kTokenCapExceeded, std::to_string(tokens_out) + " output tokens requested, cap " +
                                           std::to_string(backend.token_cap));
  }
  if (sketch.token_estimate > backend.max_input_tokens) {
    fail(ErrorCode::kTokenCapExceeded, "prompt of " + std::to_string(sketch.token_estimate) +
                                           " tokens exceeds " +
                                           std::to_string(backend.max_input_tokens));
  }
}

double decode_for(const BackendModel& backend, std::size_t tokens_out, double z) {
  if (tokens_out == 0 || backend.reference_tokens_out <= 0.0) return 0.0;
  return backend.decode.at(z) * static_cast<double>(tokens_out) / backend.reference_tokens_out;
}

}  // namespace

BackendModel BackendModel::edge(const StageTable& table, decision::Action action) {
  BackendModel b;
  b.name = "edge";
  b.prefill = table.at(action, Stage::kPrefill);
  b.decode = table.at(action, Stage::kDecode);
  b.reference_tokens_out = action == decision::Action::kEdgeRag ? 112.0 : 96.0;
  return b;
}

BackendModel BackendModel::cloud(const StageTable& table) {
  BackendModel b;
  b.name = "cloud";
  b.prefill = table.at(decision::Action::kEscalate, Stage::kPrefill);
  b.decode = table.at(decision::Action::kEscalate, Stage::kDecode);
  b.reference_tokens_out = 240.0;
  // Remote compute is not billed to the device battery.
  b.prefill_power_w = b.idle_power_w;
  b.decode_power_w = b.idle_power_w;
  b.token_cap = kCloudTokenCap;
  return b;
}

std::string compose_answer(const codec::PromptSketch& sketch, decision::Action action) {
  std::string semantics;
  const auto s = sketch.body.find("[Semantics]");
  if (s != std::string::npos) semantics = sketch.body.substr(s, sketch.body.find('\n', s) - s);
  const std::string pattern = digest128(semantics).hex().substr(0, 8);
  std::string text;
  switch (action) {
    case decision::Action::kEscalate: text = "Remote analysis of pattern " + pattern + "."; break;
    case decision::Action::kEdgeRag: text = "Grounded summary of pattern " + pattern + "."; break;
    default: text = "Local summary of pattern " + pattern + "."; break;
  }
  if (sketch.task == codec::TaskKind::kAdvise) text += " Advice follows the site policy.";
  if (!sketch.doc_ids.empty()) {
    text += " Evidence:";
    for (const auto& id : sketch.doc_ids) text += " [doc:" + id + "]";
  }
  return text;
}

Generation generate_local(const codec::PromptSketch& sketch, const BackendModel& backend,
                          decision::QuantLevel level, std::size_t tokens_out, double z_prefill,
                          double z_decode) {
  check_caps(sketch, backend, tokens_out);
  const double mult = backend.quant_multiplier[static_cast<std::size_t>(level)];
  Generation g;
  g.tokens_out = tokens_out;
  g.prefill_ms = mult * (backend.prefill.at(z_prefill) +
                         backend.prefill_ms_per_input_token * static_cast<double>(sketch.token_estimate));
  g.decode_ms = mult * decode_for(backend, tokens_out, z_decode);
  g.ftt_ms = g.prefill_ms + (tokens_out == 0 ? 0.0 : g.decode_ms / static_cast<double>(tokens_out));
  g.ttcr_ms = g.prefill_ms + g.decode_ms;
  g.text = tokens_out == 0 ? std::string() : compose_answer(sketch, backend.name == "edge" && !sketch.doc_ids.empty()
                                                                        ? decision::Action::kEdgeRag
                                                                        : decision::Action::kEdgeOnly);
  g.events = {{"prefill", backend.prefill_power_w, g.prefill_ms},
              {"decode", backend.decode_power_w, g.decode_ms}};
  g.energy_j = energy_meter(g.events, backend.idle_power_w, tokens_out).joules;
  return g;
}

Generation generate_cloud(const codec::PromptSketch& sketch, const LinkProfile& link,
                          const LinkDraw& draw, const BackendModel& backend,
                          std::size_t tokens_out, double z_prefill, double z_decode,
                          const CloudOptions& options) {
  if (!sketch.redacted) fail(ErrorCode::kRedactionNotApplied, "cloud payload was not redacted");
  if (options.scanner != nullptr) {
    const auto scan = options.scanner->scan(sketch.body, options.raw_values);
    if (!scan.clean()) {
      fail(ErrorCode::kRedactionNotApplied,
           "payload scan found " + std::to_string(scan.pii_matches) + " PII and " +
               std::to_string(scan.raw_value_matches) + " raw value matches");
    }
  }
  if (!link.up) fail(ErrorCode::kLinkDown, "link '" + link.name + "' is down");
  check_caps(sketch, backend, tokens_out);
  Generation g;
  g.tokens_out = tokens_out;
  g.bytes_up = sketch.body.size() + (sketch.body.empty() ? 0 : options.header_bytes);
  g.serialization_ms = options.serialization_ms_per_kb * static_cast<double>(sketch.body.size()) / 1024.0;
  g.up_ms = transfer_ms(static_cast<double>(g.bytes_up), draw.up_mbps);
  g.rtt_ms = draw.rtt_ms;
  g.prefill_ms = backend.prefill.at(z_prefill) +
                 backend.prefill_ms_per_input_token * static_cast<double>(sketch.token_estimate);
  g.decode_ms = decode_for(backend, tokens_out, z_decode);
  g.text = tokens_out == 0 ? std::string() : compose_answer(sketch, decision::Action::kEscalate);
  g.bytes_down = g.text.size() + (g.text.empty() ? 0 : options.header_bytes);
  g.down_ms = transfer_ms(static_cast<double>(g.bytes_down), draw.down_mbps);
  const double before_tokens = g.serialization_ms + g.up_ms + g.rtt_ms + g.prefill_ms;
  g.ftt_ms = before_tokens + (tokens_out == 0 ? 0.0 : g.decode_ms / static_cast<double>(tokens_out));
  g.ttcr_ms = before_tokens + g.decode_ms + g.down_ms;
  g.events = {{"serialize", backend.idle_power_w + 2.0, g.serialization_ms},
              {"uplink", options.radio_power_w, g.up_ms},
              {"wait", backend.idle_power_w + 0.3, g.rtt_ms + g.prefill_ms + g.decode_ms},
              {"downlink", options.radio_power_w, g.down_ms}};
  g.energy_j = energy_meter(g.events, backend.idle_power_w, tokens_out).joules;
  return g;
}

}  // namespace senseplane::runtime
