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

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/regex.hpp>

#include "senseplane/codec/sketch.hpp"
#include "senseplane/digest.hpp"
#include "senseplane/retrieval/snippet.hpp"

namespace senseplane::secure {

enum class PiiCategory { kName, kCoordinate, kIdentifier, kWaveformRef };

std::string_view to_string(PiiCategory category);

struct RedactionDiff {
  // Byte span in the original payload.
  std::size_t begin = 0;
  std::size_t end = 0;
  PiiCategory category = PiiCategory::kName;
  std::string replacement;
};

struct RedactionReport {
  Digest128 original_hash;
  std::string redacted_payload;
  std::vector<RedactionDiff> diffs;
  // Non-whitelisted matches still present in the redacted payload.
  std::size_t surviving_matches = 0;
  std::size_t whitelisted_matches = 0;

  bool leak_flag() const { return !diffs.empty() || surviving_matches > 0; }
};

struct RedactionPolicy {
  std::vector<std::string> name_dictionary;
  std::vector<std::string> coordinate_patterns;
  std::vector<std::string> identifier_patterns;
  std::vector<std::string> waveform_patterns;
  // Exact match strings allowed through untouched.
  std::vector<std::string> whitelist;
  // Categories detected and counted but not rewritten.
  std::set<PiiCategory> flag_only;
  std::string alias_key = "senseplane-alias-key";
  std::string stream_id = "default";

  static RedactionPolicy defaults();
};

// Pattern and dictionary based PII rewriting with keyed-hash aliases
// ("Resident KQD"). Existing placeholders are never matched again, which
// makes redaction idempotent.
class Redactor {
 public:
  explicit Redactor(RedactionPolicy policy);

  RedactionReport redact_text(std::string_view text) const;
  std::pair<codec::PromptSketch, RedactionReport> redact(const codec::PromptSketch& sketch) const;

  // Non-whitelisted matches outside placeholders.
  std::size_t count_matches(std::string_view text) const;

  std::string alias(PiiCategory category, std::string_view entity) const;
  const RedactionPolicy& policy() const { return policy_; }

 private:
  struct Match {
    std::size_t begin;
    std::size_t end;
    PiiCategory category;
  };
  std::vector<Match> find_matches(const std::string& text, std::size_t* whitelisted) const;

  RedactionPolicy policy_;
  std::set<std::string> whitelist_;
  std::vector<std::pair<boost::regex, PiiCategory>> patterns_;
  boost::regex placeholder_;
};

struct DegradeResult {
  std::vector<retrieval::ScoredSnippet> snippets;
  std::size_t flagged = 0;
};

// Replaces every snippet whose text trips the redactor with
// "<doc_type>: <aliases>"; doc ids are kept for audit.
DegradeResult degrade_evidence(std::vector<retrieval::ScoredSnippet> snippets,
                               const Redactor& redactor);

}  // namespace senseplane::secure
