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

inline constexpr std::size_t kMaxPasses = 8;

struct UncertaintyEstimate {
  double sensory_entropy = 0.0;
  double language_entropy = 0.0;
  double eta = 0.5;
  double fused = 0.0;
};

// Shannon entropy normalized by ln(n); 0 ln 0 = 0 and a single class gives 0.
double entropy(std::span<const double> posteriors);

// Averages the stochastic passes, takes normalized entropies and mixes them:
// fused = eta * sensory + (1 - eta) * language.
UncertaintyEstimate fuse_uncertainty(const std::vector<std::vector<double>>& passes,
                                     std::span<const double> language, double eta);

}  // namespace senseplane::decision
