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

#include "senseplane/decision/selective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "senseplane/error.hpp"

namespace senseplane::decision {

double expected_calibration_error(std::span<const double> confidence,
                                  const std::vector<bool>& correct, std::size_t bins) {
  if (confidence.size() != correct.size()) fail(ErrorCode::kShapeMismatch, "length mismatch");
  if (confidence.empty() || bins == 0) return 0.0;
  std::vector<double> conf_sum(bins, 0.0);
  std::vector<double> acc_sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t i = 0; i < confidence.size(); ++i) {
    const double c = std::clamp(confidence[i], 0.0, 1.0);
    const std::size_t b = std::min(bins - 1, static_cast<std::size_t>(c * static_cast<double>(bins)));
    conf_sum[b] += c;
    acc_sum[b] += correct[i] ? 1.0 : 0.0;
    ++count[b];
  }
  double ece = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    ece += std::abs(acc_sum[b] - conf_sum[b]) / static_cast<double>(confidence.size());
  }
  return ece;
}

double auroc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) fail(ErrorCode::kShapeMismatch, "length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (positive[order[k]]) {
        rank_sum += avg_rank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) return std::numeric_limits<double>::quiet_NaN();
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

SelectiveMetrics selective_metrics(std::span<const SelectiveRecord> records) {
  if (records.size() < 2) fail(ErrorCode::kInsufficientData, "selective metrics need at least 2 records");
  const std::size_t n = records.size();
  SelectiveMetrics m;

  std::vector<double> thresholds;
  thresholds.reserve(n);
  for (const auto& r : records) thresholds.push_back(r.u);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::size_t known = 0;
  std::size_t unknown = 0;
  for (const auto& r : records) (r.unknown ? unknown : known) += 1;

  for (const double t : thresholds) {
    std::size_t accepted = 0;
    std::size_t errors = 0;
    std::size_t known_correct = 0;
    std::size_t unknown_accepted = 0;
    for (const auto& r : records) {
      if (r.u > t) continue;
      ++accepted;
      if (!r.correct) ++errors;
      if (!r.unknown && r.correct) ++known_correct;
      if (r.unknown) ++unknown_accepted;
    }
    m.risk_coverage.push_back({t, static_cast<double>(accepted) / static_cast<double>(n),
                               static_cast<double>(errors) / static_cast<double>(accepted)});
    m.oscr.push_back({t, known == 0 ? 0.0 : static_cast<double>(known_correct) / static_cast<double>(known),
                      unknown == 0 ? 0.0 : static_cast<double>(unknown_accepted) / static_cast<double>(unknown)});
  }
  for (std::size_t i = 1; i < m.risk_coverage.size(); ++i) {
    const auto& a = m.risk_coverage[i - 1];
    const auto& b = m.risk_coverage[i];
    m.aurc += (a.coverage - b.coverage) * (a.risk + b.risk) / 2.0;
  }

  std::vector<double> conf(n);
  std::vector<bool> correct(n);
  std::vector<double> scores(n);
  std::vector<bool> is_unknown(n);
  for (std::size_t i = 0; i < n; ++i) {
    conf[i] = records[i].confidence < 0.0 ? 1.0 - records[i].u : records[i].confidence;
    correct[i] = records[i].correct;
    scores[i] = records[i].u;
    is_unknown[i] = records[i].unknown;
  }
  m.ece = expected_calibration_error(conf, correct);
  m.auroc_unknown = auroc(scores, is_unknown);
  return m;
}

}  // namespace senseplane::decision
