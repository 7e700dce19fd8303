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

#include "senseplane/decision/uncertainty.hpp"

#include <cmath>
#include <string>

#include "senseplane/error.hpp"

namespace senseplane::decision {
namespace {

void check_distribution(std::span<const double> p) {
  if (p.empty()) fail(ErrorCode::kNotADistribution, "empty probability vector");
  double sum = 0.0;
  for (const double v : p) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::kNotADistribution, "negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(ErrorCode::kNotADistribution, "entries sum to " + std::to_string(sum));
  }
}

}  // namespace

double entropy(std::span<const double> posteriors) {
  check_distribution(posteriors);
  if (posteriors.size() == 1) return 0.0;
  double h = 0.0;
  for (const double p : posteriors) {
    if (p > 0.0) h -= p * std::log(p);
  }
  const double normalized = h / std::log(static_cast<double>(posteriors.size()));
  return std::min(1.0, std::max(0.0, normalized));
}

UncertaintyEstimate fuse_uncertainty(const std::vector<std::vector<double>>& passes,
                                     std::span<const double> language, double eta) {
  if (passes.empty() || passes.size() > kMaxPasses) {
    fail(ErrorCode::kInvalidArgument, "between 1 and 8 stochastic passes are required");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) fail(ErrorCode::kInvalidArgument, "eta outside [0,1]");
  const std::size_t n = passes.front().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& pass : passes) {
    if (pass.size() != n) fail(ErrorCode::kNotADistribution, "passes disagree on class count");
    check_distribution(pass);
    for (std::size_t i = 0; i < n; ++i) mean[i] += pass[i];
  }
  for (double& m : mean) m /= static_cast<double>(passes.size());
  UncertaintyEstimate u;
  u.sensory_entropy = entropy(mean);
  u.language_entropy = entropy(language);
  u.eta = eta;
  u.fused = eta * u.sensory_entropy + (1.0 - eta) * u.language_entropy;
  return u;
}

}  // namespace senseplane::decision
