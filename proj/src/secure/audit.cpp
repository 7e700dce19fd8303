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

#include "senseplane/secure/audit.hpp"

#include <climits>
#include <sstream>

#include "json.hpp"
#include "senseplane/digest.hpp"
#include "senseplane/error.hpp"

namespace senseplane::secure {
namespace {

using ojson = nlohmann::ordered_json;

}  // namespace

std::string format_audit_line(const AuditRecord& r) {
  ojson cost = {{"lat_ms", r.cost.lat_ms},
                {"energy_j", r.cost.energy_j},
                {"tokens", r.cost.tokens},
                {"risk", r.cost.risk},
                {"total", r.cost.total}};
  ojson j = {{"seq", r.seq},
             {"timestamp_ms", r.timestamp_ms},
             {"stream_id", r.stream_id},
             {"decision_id", r.decision_id},
             {"action", std::string(decision::to_string(r.action))},
             {"u", r.u},
             {"cost", std::move(cost)},
             {"redaction_diff_count", r.redaction_diff_count},
             {"doc_ids", r.doc_ids},
             {"guard_verdict", std::string(to_string(r.guard_verdict))},
             {"prompt_checksum", r.prompt_checksum}};
  std::string payload = j.dump();
  return payload + '\t' + digest128(payload).hex();
}

AuditRecord parse_audit_payload(std::string_view payload) {
  try {
    const ojson j = ojson::parse(payload);
    AuditRecord r;
    r.seq = j.at("seq").get<std::uint64_t>();
    r.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    r.stream_id = j.at("stream_id").get<std::string>();
    r.decision_id = j.at("decision_id").get<std::string>();
    r.action = decision::action_from_string(j.at("action").get<std::string>());
    r.u = j.at("u").get<double>();
    const auto& c = j.at("cost");
    r.cost.lat_ms = c.at("lat_ms").get<double>();
    r.cost.energy_j = c.at("energy_j").get<double>();
    r.cost.tokens = c.at("tokens").get<double>();
    r.cost.risk = c.at("risk").get<double>();
    r.cost.total = c.at("total").get<double>();
    r.redaction_diff_count = j.at("redaction_diff_count").get<std::size_t>();
    r.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    r.guard_verdict = guard_verdict_from_string(j.at("guard_verdict").get<std::string>());
    r.prompt_checksum = j.at("prompt_checksum").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatError, std::string("audit payload malformed: ") + e.what());
  }
}

AuditLog::AuditLog(const std::filesystem::path& path)
    : file_(path, std::ios::binary | std::ios::app) {
  if (!file_) fail(ErrorCode::kIoError, "cannot open audit log " + path.string());
}

std::uint64_t AuditLog::append(AuditRecord record) {
  std::lock_guard lock(mutex_);
  record.seq = lines_.size();
  std::string line = format_audit_line(record);
  if (file_.is_open()) {
    file_ << line << '\n';
    file_.flush();
    if (!file_) fail(ErrorCode::kIoError, "audit append failed");
  }
  last_timestamp_ = std::max(last_timestamp_, record.timestamp_ms);
  lines_.push_back(std::move(line));
  records_.push_back(std::move(record));
  return records_.back().seq;
}

std::size_t AuditLog::size() const {
  std::lock_guard lock(mutex_);
  return lines_.size();
}

std::string AuditLog::contents() const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

std::vector<AuditRecord> AuditLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::string_view to_string(AuditGapKind kind) {
  switch (kind) {
    case AuditGapKind::kChecksumMismatch: return "checksum-mismatch";
    case AuditGapKind::kMalformed: return "malformed";
    case AuditGapKind::kMissingSequence: return "missing-sequence";
    case AuditGapKind::kClockRegression: return "clock-regression";
  }
  return "malformed";
}

AuditVerification verify_audit(std::string_view contents, bool strict) {
  AuditVerification v;
  std::size_t invalid_since_valid = 0;
  std::size_t missing = 0;
  std::int64_t last_seq = -1;
  std::int64_t last_ts = INT64_MIN;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    const std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    ++v.lines;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos) {
      v.gaps.push_back({line_no, AuditGapKind::kMalformed, "no checksum field"});
      ++invalid_since_valid;
      continue;
    }
    const std::string_view payload = line.substr(0, tab);
    const std::string_view checksum = line.substr(tab + 1);
    if (digest128(payload).hex() != checksum) {
      if (strict) {
        fail(ErrorCode::kChecksumMismatch, "audit line " + std::to_string(line_no));
      }
      v.gaps.push_back({line_no, AuditGapKind::kChecksumMismatch, "checksum does not match payload"});
      ++invalid_since_valid;
      continue;
    }
    AuditRecord record;
    try {
      record = parse_audit_payload(payload);
    } catch (const Error& e) {
      v.gaps.push_back({line_no, AuditGapKind::kMalformed, e.what()});
      ++invalid_since_valid;
      continue;
    }
    const auto seq = static_cast<std::int64_t>(record.seq);
    const std::int64_t skipped = seq - last_seq - 1;
    if (skipped < 0) {
      v.gaps.push_back({line_no, AuditGapKind::kMalformed, "sequence number repeated or reordered"});
      ++invalid_since_valid;
      continue;
    }
    if (static_cast<std::size_t>(skipped) > invalid_since_valid) {
      const std::size_t unaccounted = static_cast<std::size_t>(skipped) - invalid_since_valid;
      missing += unaccounted;
      v.gaps.push_back({line_no, AuditGapKind::kMissingSequence,
                        std::to_string(unaccounted) + " record(s) missing before seq " +
                            std::to_string(seq)});
    }
    if (record.timestamp_ms < last_ts) {
      v.gaps.push_back({line_no, AuditGapKind::kClockRegression,
                        "timestamp " + std::to_string(record.timestamp_ms) + " < " +
                            std::to_string(last_ts)});
    }
    last_ts = std::max(last_ts, record.timestamp_ms);
    last_seq = seq;
    invalid_since_valid = 0;
    ++v.valid_records;
  }
  v.expected_records = v.lines + missing;
  v.completeness = v.expected_records == 0
                       ? 1.0
                       : static_cast<double>(v.valid_records) / static_cast<double>(v.expected_records);
  v.complete = v.valid_records == v.expected_records;
  return v;
}

AuditVerification verify_audit_file(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open audit log " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return verify_audit(ss.str(), strict);
}

}  // namespace senseplane::secure
