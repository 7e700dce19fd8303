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
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "senseplane/decision/types.hpp"
#include "senseplane/secure/guard.hpp"

namespace senseplane::secure {

struct AuditRecord {
  std::uint64_t seq = 0;  // assigned on append
  std::int64_t timestamp_ms = 0;
  std::string stream_id;
  std::string decision_id;
  decision::Action action = decision::Action::kEdgeOnly;
  double u = 0.0;
  decision::CostVector cost;
  std::size_t redaction_diff_count = 0;
  std::vector<std::string> doc_ids;
  GuardVerdict guard_verdict = GuardVerdict::kPass;
  std::string prompt_checksum;  // hex digest of the prompt body, never the body
};

// One line per record: compact JSON payload with fixed field order, a tab,
// then the hex BLAKE2b-128 of the payload bytes.
std::string format_audit_line(const AuditRecord& record);
AuditRecord parse_audit_payload(std::string_view payload);

// Append-only, single-writer log. With a path, every append is written and
// flushed as one line; the in-memory copy is always kept.
class AuditLog {
 public:
  AuditLog() = default;
  explicit AuditLog(const std::filesystem::path& path);

  std::uint64_t append(AuditRecord record);
  std::size_t size() const;
  std::string contents() const;
  std::vector<AuditRecord> records() const;

 private:
  mutable std::mutex mutex_;
  std::ofstream file_;
  std::vector<std::string> lines_;
  std::vector<AuditRecord> records_;
  std::int64_t last_timestamp_ = INT64_MIN;
};

enum class AuditGapKind { kChecksumMismatch, kMalformed, kMissingSequence, kClockRegression };

std::string_view to_string(AuditGapKind kind);

struct AuditGap {
  std::size_t line = 0;  // 1-based
  AuditGapKind kind = AuditGapKind::kMalformed;
  std::string detail;
};

struct AuditVerification {
  std::size_t lines = 0;
  std::size_t valid_records = 0;
  std::size_t expected_records = 0;
  bool complete = true;
  // valid / expected; 1.0 for an empty log.
  double completeness = 1.0;
  std::vector<AuditGap> gaps;
};

// Recomputes checksums, sequence continuity and timestamp order. Clock
// regressions are reported as gaps but do not make the log incomplete.
// With `strict`, the first checksum mismatch throws.
AuditVerification verify_audit(std::string_view contents, bool strict = false);
AuditVerification verify_audit_file(const std::filesystem::path& path, bool strict = false);

}  // namespace senseplane::secure
