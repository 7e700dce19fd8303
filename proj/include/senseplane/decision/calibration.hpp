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

std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0);

// Mean negative log-likelihood of softmax(logits / T).
double negative_log_likelihood(const std::vector<std::vector<double>>& logits,
                               std::span<const int> labels, double temperature);

struct TemperatureFit {
  double temperature = 1.0;
  double nll_at_one = 0.0;
  double nll = 0.0;
};

inline constexpr double kMinTemperature = 0.05;
inline constexpr double kMaxTemperature = 20.0;

// Minimizes NLL over T in [0.05, 20]: a log-spaced scan followed by
// golden-section refinement around the best scan point.
TemperatureFit temperature_scale(const std::vector<std::vector<double>>& logits,
                                 std::span<const int> labels);

}  // namespace senseplane::decision
