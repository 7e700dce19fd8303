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

#include "senseplane/secure/redactor.hpp"

#include <algorithm>

#include "senseplane/error.hpp"

namespace senseplane::secure {
namespace {

constexpr std::string_view kEmptyEvidenceBlock = "[Evidence]\n";

std::string regex_escape(std::string_view text) {
  static const std::string_view kSpecial = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (const char c : text) {
    if (kSpecial.find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

std::string_view placeholder_word(PiiCategory category) {
  switch (category) {
    case PiiCategory::kName: return "Resident";
    case PiiCategory::kCoordinate: return "Location";
    case PiiCategory::kIdentifier: return "Entity";
    case PiiCategory::kWaveformRef: return "Waveform";
  }
  return "Entity";
}

}  // namespace

std::string_view to_string(PiiCategory category) {
  switch (category) {
    case PiiCategory::kName: return "name";
    case PiiCategory::kCoordinate: return "coordinate";
    case PiiCategory::kIdentifier: return "identifier";
    case PiiCategory::kWaveformRef: return "waveform-ref";
  }
  return "name";
}

RedactionPolicy RedactionPolicy::defaults() {
  RedactionPolicy p;
  p.name_dictionary = {"Alice", "Amara", "Bruno", "Carlos", "Chen",   "Dmitri", "Elena",
                       "Fatima", "Grace", "Hiro",  "Ines",   "John",   "Kofi",   "Laila",
                       "Maria",  "Mateo", "Nadia", "Omar",   "Priya",  "Rosa",   "Sven",
                       "Tariq",  "Uma",   "Viktor", "Wei",   "Yusuf",  "Zara"};
  // Four or more decimals: salient values in sketches carry exactly three.
  p.coordinate_patterns = {R"([-+]?\d{1,3}\.\d{4,}\s*,\s*[-+]?\d{1,3}\.\d{4,})",
                           R"(\b(?:lat|lon|lng)\s*[=:]\s*[-+]?\d{1,3}\.\d{4,})"};
  p.identifier_patterns = {R"(\b(?:MRN|SSN|BADGE|PID|ACC)[-:#]?\d{3,}\b)",
                           R"(\b\d{3}-\d{3}-\d{4}\b)",
                           R"(\b[A-Za-z0-9._+-]+@[A-Za-z0-9-]+\.[A-Za-z0-9.-]+\b)",
                           R"(\b(?:[0-9A-Fa-f]{2}:){5}[0-9A-Fa-f]{2}\b)"};
  p.waveform_patterns = {R"(\b(?:wav|csi|raw)[-_:][0-9a-f]{8,}\b)",
                         R"(\bsha256:[0-9a-f]{16,}\b)"};
  p.whitelist = {"MRN-000"};
  return p;
}

Redactor::Redactor(RedactionPolicy policy) : policy_(std::move(policy)) {
  const bool any_pattern = !policy_.name_dictionary.empty() ||
                           !policy_.coordinate_patterns.empty() ||
                           !policy_.identifier_patterns.empty() ||
                           !policy_.waveform_patterns.empty();
  if (!any_pattern) fail(ErrorCode::kInvalidArgument, "redaction policy has no patterns");
  whitelist_.insert(policy_.whitelist.begin(), policy_.whitelist.end());
  try {
    // Order matters on overlap: earlier categories win.
    for (const auto& p : policy_.waveform_patterns) patterns_.emplace_back(boost::regex(p), PiiCategory::kWaveformRef);
    for (const auto& p : policy_.identifier_patterns) patterns_.emplace_back(boost::regex(p), PiiCategory::kIdentifier);
    for (const auto& p : policy_.coordinate_patterns) patterns_.emplace_back(boost::regex(p), PiiCategory::kCoordinate);
    if (!policy_.name_dictionary.empty()) {
      std::vector<std::string> names = policy_.name_dictionary;
      std::sort(names.begin(), names.end(),
                [](const std::string& a, const std::string& b) { return a.size() > b.size() || (a.size() == b.size() && a < b); });
      std::string alt;
      for (const auto& n : names) {
        if (n.empty()) continue;
        if (!alt.empty()) alt += '|';
        alt += regex_escape(n);
      }
      patterns_.emplace_back(boost::regex("\\b(?:" + alt + ")\\b"), PiiCategory::kName);
    }
    placeholder_ = boost::regex(R"((?:Resident|Location|Entity|Waveform) [A-Z]{3})");
  } catch (const boost::regex_error& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad redaction pattern: ") + e.what());
  }
}

std::string Redactor::alias(PiiCategory category, std::string_view entity) const {
  std::string material = policy_.stream_id;
  material += '\0';
  material += to_string(category);
  material += '\0';
  material += entity;
  const auto h = keyed_hash(policy_.alias_key, material, 16);
  std::string out(placeholder_word(category));
  out += ' ';
  for (int i = 0; i < 3; ++i) out += static_cast<char>('A' + h[i] % 26);
  return out;
}

std::vector<Redactor::Match> Redactor::find_matches(const std::string& text,
                                                    std::size_t* whitelisted) const {
  std::vector<std::pair<std::size_t, std::size_t>> taken;
  for (boost::sregex_iterator it(text.begin(), text.end(), placeholder_), end; it != end; ++it) {
    const auto b = static_cast<std::size_t>(it->position());
    taken.emplace_back(b, b + static_cast<std::size_t>(it->length()));
  }
  const auto overlaps = [&](std::size_t b, std::size_t e) {
    return std::any_of(taken.begin(), taken.end(),
                       [&](const auto& t) { return b < t.second && t.first < e; });
  };
  struct Candidate {
    std::size_t begin;
    std::size_t end;
    std::size_t rank;
    bool whitelisted;
  };
  std::vector<Candidate> found;
  for (std::size_t rank = 0; rank < patterns_.size(); ++rank) {
    const auto& re = patterns_[rank].first;
    for (boost::sregex_iterator it(text.begin(), text.end(), re), end; it != end; ++it) {
      const auto b = static_cast<std::size_t>(it->position());
      const auto e = b + static_cast<std::size_t>(it->length());
      if (b == e || overlaps(b, e)) continue;
      found.push_back({b, e, rank, whitelist_.count(it->str()) != 0});
    }
  }
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.rank < b.rank;
  });
  // Overlapping matches from different patterns are redacted as one span so
  // that no fragment of either survives into a second pass.
  std::vector<Match> out;
  for (std::size_t i = 0; i < found.size();) {
    std::size_t end = found[i].end;
    std::size_t rank = patterns_.size();
    std::size_t j = i;
    for (; j < found.size() && found[j].begin < end; ++j) {
      end = std::max(end, found[j].end);
      if (!found[j].whitelisted) rank = std::min(rank, found[j].rank);
    }
    if (rank == patterns_.size()) {
      if (whitelisted != nullptr) *whitelisted += j - i;
    } else {
      out.push_back({found[i].begin, end, patterns_[rank].second});
    }
    i = j;
  }
  return out;
}

std::size_t Redactor::count_matches(std::string_view text) const {
  return find_matches(std::string(text), nullptr).size();
}

RedactionReport Redactor::redact_text(std::string_view text) const {
  RedactionReport report;
  report.original_hash = digest128(text);
  const std::string source(text);
  const auto matches = find_matches(source, &report.whitelisted_matches);
  std::string out;
  out.reserve(source.size());
  std::size_t cursor = 0;
  for (const Match& m : matches) {
    if (policy_.flag_only.count(m.category) != 0) continue;
    out.append(source, cursor, m.begin - cursor);
    RedactionDiff diff{m.begin, m.end, m.category,
                       alias(m.category, std::string_view(source).substr(m.begin, m.end - m.begin))};
    out += diff.replacement;
    cursor = m.end;
    report.diffs.push_back(std::move(diff));
  }
  out.append(source, cursor, std::string::npos);
  report.surviving_matches = count_matches(out);
  report.redacted_payload = std::move(out);
  return report;
}

std::pair<codec::PromptSketch, RedactionReport> Redactor::redact(
    const codec::PromptSketch& sketch) const {
  RedactionReport report = redact_text(sketch.body);
  codec::PromptSketch out = sketch;
  out.body = report.redacted_payload;
  out.redacted = true;
  std::size_t bytes = out.body.size();
  if (out.doc_ids.empty() && out.body.find(kEmptyEvidenceBlock) != std::string::npos) {
    bytes -= kEmptyEvidenceBlock.size();
  }
  out.token_estimate = codec::estimate_tokens(bytes);
  return {std::move(out), std::move(report)};
}

DegradeResult degrade_evidence(std::vector<retrieval::ScoredSnippet> snippets,
                               const Redactor& redactor) {
  DegradeResult result;
  for (auto& s : snippets) {
    const RedactionReport report = redactor.redact_text(s.snippet.text);
    if (!report.leak_flag()) continue;
    std::vector<std::string> aliases;
    for (const auto& d : report.diffs) {
      if (std::find(aliases.begin(), aliases.end(), d.replacement) == aliases.end()) {
        aliases.push_back(d.replacement);
      }
    }
    std::string summary(retrieval::to_string(s.snippet.doc_type));
    summary += ":";
    for (std::size_t i = 0; i < aliases.size(); ++i) summary += (i == 0 ? " " : ", ") + aliases[i];
    if (aliases.empty()) summary += " withheld";
    s.snippet.text = std::move(summary);
    s.snippet.abstracted = true;
    ++result.flagged;
  }
  result.snippets = std::move(snippets);
  return result;
}

}  // namespace senseplane::secure
