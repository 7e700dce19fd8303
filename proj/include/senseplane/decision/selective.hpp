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

#include <span>
#include <vector>

namespace senseplane::decision {

struct SelectiveRecord {
  double u = 0.0;
  bool correct = true;
  bool unknown = false;
  // Confidence for ECE; negative means use 1 - u.
  double confidence = -1.0;
};

struct RiskCoveragePoint {
  double threshold = 0.0;  // accept when u <= threshold
  double coverage = 0.0;
  double risk = 0.0;
};

struct OscrPoint {
  double threshold = 0.0;
  double correct_known_rate = 0.0;
  double false_accept_rate = 0.0;
};

struct SelectiveMetrics {
  // One point per distinct u, coverage strictly decreasing.
  std::vector<RiskCoveragePoint> risk_coverage;
  // Trapezoid area under risk over the covered range of the curve.
  double aurc = 0.0;
  double ece = 0.0;
  // NaN when either class is absent.
  double auroc_unknown = 0.0;
  std::vector<OscrPoint> oscr;
};

inline constexpr std::size_t kEceBins = 15;

double expected_calibration_error(std::span<const double> confidence,
                                  const std::vector<bool>& correct, std::size_t bins = kEceBins);

// Mann-Whitney estimate of P(score of a positive > score of a negative),
// ties counted half.
double auroc(std::span<const double> scores, const std::vector<bool>& positive);

SelectiveMetrics selective_metrics(std::span<const SelectiveRecord> records);

}  // namespace senseplane::decision
