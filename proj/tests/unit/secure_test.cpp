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

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "senseplane/error.hpp"
#include "senseplane/random.hpp"
#include "senseplane/secure/audit.hpp"
#include "senseplane/secure/guard.hpp"
#include "senseplane/secure/redactor.hpp"
#include "senseplane/secure/scanner.hpp"

namespace senseplane::secure {
namespace {

const Redactor& default_redactor() {
  static const Redactor r(RedactionPolicy::defaults());
  return r;
}

TEST(Redactor, ReplacesEachCategory) {
  const auto& r = default_redactor();
  const std::string text =
      "Maria fell near 47.61234, -122.33121 (MRN-48213) ref wav_0123abcd9f mail maria@example.org";
  const auto rep = r.redact_text(text);
  EXPECT_EQ(rep.diffs.size(), 5u);
  EXPECT_EQ(rep.surviving_matches, 0u);
  EXPECT_EQ(rep.redacted_payload.find("Maria"), std::string::npos);
  EXPECT_EQ(rep.redacted_payload.find("47.61234"), std::string::npos);
  EXPECT_EQ(rep.redacted_payload.find("48213"), std::string::npos);
  EXPECT_EQ(rep.redacted_payload.find("0123abcd9f"), std::string::npos);
  EXPECT_EQ(rep.redacted_payload.find("example.org"), std::string::npos);
  EXPECT_NE(rep.redacted_payload.find(r.alias(PiiCategory::kName, "Maria")), std::string::npos);
  EXPECT_EQ(rep.original_hash, digest128(text));
}

TEST(Redactor, DiffSpansPointAtOriginal) {
  const auto& r = default_redactor();
  const std::string text = "Call Omar at 555-123-4567 today";
  const auto rep = r.redact_text(text);
  ASSERT_EQ(rep.diffs.size(), 2u);
  EXPECT_EQ(text.substr(rep.diffs[0].begin, rep.diffs[0].end - rep.diffs[0].begin), "Omar");
  EXPECT_EQ(rep.diffs[0].category, PiiCategory::kName);
  EXPECT_EQ(text.substr(rep.diffs[1].begin, rep.diffs[1].end - rep.diffs[1].begin), "555-123-4567");
  EXPECT_EQ(rep.diffs[1].category, PiiCategory::kIdentifier);
}

TEST(Redactor, AliasStablePerStreamAndEntity) {
  const auto& r = default_redactor();
  EXPECT_EQ(r.alias(PiiCategory::kName, "Kofi"), r.alias(PiiCategory::kName, "Kofi"));
  auto other = RedactionPolicy::defaults();
  other.stream_id = "stream-b";
  const Redactor rb(other);
  std::size_t differing = 0;
  for (const char* n : {"Kofi", "Maria", "Wei", "Zara", "Hiro", "Rosa"}) {
    differing += r.alias(PiiCategory::kName, n) != rb.alias(PiiCategory::kName, n) ? 1 : 0;
  }
  EXPECT_GE(differing, 4u);
  const std::string a = r.alias(PiiCategory::kIdentifier, "MRN-1234");
  EXPECT_EQ(a.rfind("Entity ", 0), 0u);
  EXPECT_EQ(a.size(), 10u);
}

TEST(Redactor, WhitelistPassesThrough) {
  const auto rep = default_redactor().redact_text("test id MRN-000 only");
  EXPECT_TRUE(rep.diffs.empty());
  EXPECT_EQ(rep.whitelisted_matches, 1u);
  EXPECT_EQ(rep.redacted_payload, "test id MRN-000 only");
}

TEST(Redactor, FlagOnlyCountsWithoutRewriting) {
  auto p = RedactionPolicy::defaults();
  p.flag_only = {PiiCategory::kCoordinate};
  const Redactor r(p);
  const auto rep = r.redact_text("at lat=47.61234 now");
  EXPECT_TRUE(rep.diffs.empty());
  EXPECT_EQ(rep.surviving_matches, 1u);
  EXPECT_TRUE(rep.leak_flag());
}

TEST(Redactor, SketchValuesWithThreeDecimalsUntouched) {
  const std::string text = "[Semantics]z=12,7,7;h=0.125,-1.500,3.250\n";
  EXPECT_EQ(default_redactor().redact_text(text).redacted_payload, text);
}

TEST(Redactor, EmptyPolicyRejected) {
  RedactionPolicy p;
  EXPECT_THROW(Redactor r(p), Error);
}

std::string fuzz_payload(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "Maria", "Omar", "Zara", "Mariana", "resident", "kitchen", " ", ", ", ".", "\n",
      "47.61234,-122.3312", "lat: 12.34567", "MRN-", "MRN-000", "SSN#123456", "555-867-5309",
      "wav-", "deadbeef", "0123456789abcdef", "csi:", "x@y.io", "aa:bb:cc:dd:ee:ff",
      "Resident ", "ABC", "Entity", "0.125", "-3.5", "sha256:", "z=1,2,3", "[Evidence]"};
  std::string s;
  const std::size_t n = 1 + rng.index(24);
  for (std::size_t i = 0; i < n; ++i) s += pieces[rng.index(pieces.size())];
  return s;
}

TEST(Redactor, IdempotentOnFuzzedPayloads) {
  const auto& r = default_redactor();
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const std::string s = fuzz_payload(rng);
    const auto once = r.redact_text(s);
    const auto twice = r.redact_text(once.redacted_payload);
    ASSERT_EQ(twice.redacted_payload, once.redacted_payload) << s;
    EXPECT_TRUE(twice.diffs.empty()) << s;
  }
}

TEST(Redactor, SketchRedactionMarksAndReestimates) {
  codec::PromptSketch sk;
  sk.body = "[Context]note=Priya in hallway\n[Semantics]z=1;h=0.500\n[Evidence]\n[Task]explain\n";
  const auto [out, rep] = default_redactor().redact(sk);
  EXPECT_TRUE(out.redacted);
  EXPECT_EQ(out.body.find("Priya"), std::string::npos);
  EXPECT_EQ(out.token_estimate, (out.body.size() - std::string("[Evidence]\n").size() + 3) / 4);
  EXPECT_EQ(rep.diffs.size(), 1u);
}

TEST(DegradeEvidence, FlaggedSnippetBecomesAliasSummary) {
  const auto& r = default_redactor();
  retrieval::ScoredSnippet leaky;
  leaky.snippet.doc_id = "n1";
  leaky.snippet.doc_type = retrieval::DocType::kNote;
  leaky.snippet.text = "Tariq usually naps after lunch; Tariq prefers the blue chair.";
  retrieval::ScoredSnippet clean;
  clean.snippet.doc_id = "p1";
  clean.snippet.doc_type = retrieval::DocType::kPolicy;
  clean.snippet.text = "Check on residents every two hours.";
  const auto out = degrade_evidence({leaky, clean}, r);
  EXPECT_EQ(out.flagged, 1u);
  EXPECT_EQ(out.snippets[0].snippet.text,
            std::string(retrieval::to_string(retrieval::DocType::kNote)) + ": " +
                r.alias(PiiCategory::kName, "Tariq"));
  EXPECT_TRUE(out.snippets[0].snippet.abstracted);
  EXPECT_EQ(out.snippets[1].snippet.text, clean.snippet.text);
  EXPECT_FALSE(out.snippets[1].snippet.abstracted);
}

TEST(PolicyGuard, Verdicts) {
  const PolicyGuard g(GuardRules::defaults());
  EXPECT_EQ(g.check("How do I make explosives at home?"), GuardVerdict::kAbstain);
  EXPECT_EQ(g.check("Please DISABLE the smoke detector in room 4."), GuardVerdict::kHumanConfirm);
  EXPECT_EQ(g.check("Disable the kettle. The smoke detector is fine."), GuardVerdict::kPass);
  EXPECT_EQ(g.check("Resident is asleep in the bedroom."), GuardVerdict::kPass);
  EXPECT_EQ(policy_guard("turn off the gas valve", GuardRules::defaults()), GuardVerdict::kHumanConfirm);
  EXPECT_THROW(PolicyGuard empty(GuardRules{}), Error);
}

AuditRecord record_at(std::int64_t ts) {
  AuditRecord r;
  r.timestamp_ms = ts;
  r.stream_id = "s0";
  r.decision_id = "d" + std::to_string(ts);
  r.action = decision::Action::kEdgeRag;
  r.u = 0.42;
  r.doc_ids = {"p1", "n3"};
  r.prompt_checksum = digest128("body").hex();
  return r;
}

std::string sample_log(std::size_t n) {
  AuditLog log;
  for (std::size_t i = 0; i < n; ++i) log.append(record_at(static_cast<std::int64_t>(1000 + 10 * i)));
  return log.contents();
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t nl = s.find('\n', pos);
    out.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

TEST(Audit, RoundTripAndComplete) {
  const std::string contents = sample_log(20);
  const auto v = verify_audit(contents);
  EXPECT_EQ(v.lines, 20u);
  EXPECT_TRUE(v.complete);
  EXPECT_EQ(v.completeness, 1.0);
  const auto line = split_lines(contents)[3];
  const auto tab = line.rfind('\t');
  EXPECT_EQ(line.substr(tab + 1), digest128(line.substr(0, tab)).hex());
  const auto rec = parse_audit_payload(line.substr(0, tab));
  EXPECT_EQ(rec.seq, 3u);
  EXPECT_EQ(rec.doc_ids, (std::vector<std::string>{"p1", "n3"}));
  EXPECT_EQ(verify_audit("").completeness, 1.0);
}

TEST(Audit, DroppedLineIsMissingSequence) {
  auto lines = split_lines(sample_log(10));
  lines.erase(lines.begin() + 4);
  std::string joined;
  for (const auto& l : lines) joined += l + "\n";
  const auto v = verify_audit(joined);
  EXPECT_FALSE(v.complete);
  EXPECT_EQ(v.expected_records, 10u);
  EXPECT_EQ(v.valid_records, 9u);
  ASSERT_EQ(v.gaps.size(), 1u);
  EXPECT_EQ(v.gaps[0].kind, AuditGapKind::kMissingSequence);
  EXPECT_DOUBLE_EQ(v.completeness, 0.9);
}

TEST(Audit, EverySingleByteCorruptionDetected) {
  const std::string contents = sample_log(3);
  Rng rng(1);
  for (std::size_t i = 0; i < contents.size(); ++i) {
    std::string bad = contents;
    bad[i] = static_cast<char>(bad[i] ^ static_cast<char>(1 + rng.index(255)));
    const auto v = verify_audit(bad);
    EXPECT_TRUE(!v.complete || !v.gaps.empty()) << "byte " << i;
  }
}

TEST(Audit, StrictModeThrows) {
  std::string contents = sample_log(2);
  contents[5] = contents[5] == 'x' ? 'y' : 'x';
  try {
    verify_audit(contents, true);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kChecksumMismatch);
  }
}

TEST(Audit, ClockRegressionReported) {
  AuditLog log;
  log.append(record_at(2000));
  log.append(record_at(1000));
  const auto v = verify_audit(log.contents());
  ASSERT_EQ(v.gaps.size(), 1u);
  EXPECT_EQ(v.gaps[0].kind, AuditGapKind::kClockRegression);
  EXPECT_TRUE(v.complete);
}

TEST(NumericTokens, UnitsAndDigits) {
  const auto t = numeric_tokens("x=-12.3450 y=7 z=1.5e-3 w=.25 v=0.000123");
  ASSERT_EQ(t.size(), 5u);
  EXPECT_DOUBLE_EQ(t[0].value, -12.345);
  EXPECT_DOUBLE_EQ(t[0].unit, 1e-4);
  EXPECT_EQ(t[0].significant_digits, 6u);
  EXPECT_EQ(t[1].significant_digits, 1u);
  EXPECT_DOUBLE_EQ(t[2].value, 1.5e-3);
  EXPECT_DOUBLE_EQ(t[2].unit, 1e-4);
  EXPECT_DOUBLE_EQ(t[3].value, 0.25);
  EXPECT_EQ(t[4].significant_digits, 3u);
}

// Independent oracle: any %g rendering of a raw value with six or more
// significant digits appears verbatim in the payload.
bool rendering_present(const std::string& payload, double v) {
  char buf[64];
  for (int p = 6; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    // %g drops trailing zeros, so count what was actually printed.
    std::size_t sig = 0;
    bool leading = true;
    for (const char* c = buf; *c != '\0' && *c != 'e'; ++c) {
      if (*c < '0' || *c > '9') continue;
      leading = leading && *c == '0';
      sig += leading ? 0 : 1;
    }
    if (sig >= 6 && payload.find(buf) != std::string::npos) return true;
  }
  return false;
}

TEST(PayloadScanner, AgreesWithRenderingOracle) {
  const PayloadScanner scanner(default_redactor());
  Rng rng(5);
  std::size_t leaks = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> raw(32);
    for (double& v : raw) v = rng.uniform(-50.0, 50.0);
    std::string payload = "[Semantics]z=4,9;h=";
    char buf[64];
    for (int i = 0; i < 6; ++i) {
      std::snprintf(buf, sizeof buf, "%.3f,", rng.uniform(-50.0, 50.0));
      payload += buf;
    }
    if (rng.bernoulli(0.5)) {
      std::snprintf(buf, sizeof buf, " raw %.*g", 6 + static_cast<int>(rng.index(12)), raw[rng.index(raw.size())]);
      payload += buf;
    }
    bool expected = false;
    for (const double v : raw) expected = expected || rendering_present(payload, v);
    leaks += expected ? 1 : 0;
    EXPECT_EQ(scanner.scan(payload, raw).raw_value_matches > 0, expected) << payload;
  }
  EXPECT_GT(leaks, 400u);
}

TEST(PayloadScanner, PiiCountMatchesRedactor) {
  const PayloadScanner scanner(default_redactor());
  const auto s = scanner.scan("Nadia and Sven at lat=10.12345");
  EXPECT_EQ(s.pii_matches, 3u);
  EXPECT_FALSE(s.clean());
  EXPECT_TRUE(scanner.scan("Resident ABC in kitchen").clean());
}

}  // namespace
}  // namespace senseplane::secure
