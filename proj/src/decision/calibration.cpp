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

#include "senseplane/decision/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "senseplane/error.hpp"

namespace senseplane::decision {

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double hi = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - hi) / temperature);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double negative_log_likelihood(const std::vector<std::vector<double>>& logits,
                               std::span<const int> labels, double temperature) {
  double total = 0.0;
  for (std::size_t s = 0; s < logits.size(); ++s) {
    const auto& z = logits[s];
    const double hi = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (const double v : z) sum += std::exp((v - hi) / temperature);
    total += std::log(sum) - (z[static_cast<std::size_t>(labels[s])] - hi) / temperature;
  }
  return total / static_cast<double>(logits.size());
}

TemperatureFit temperature_scale(const std::vector<std::vector<double>>& logits,
                                 std::span<const int> labels) {
  if (logits.size() != labels.size()) fail(ErrorCode::kShapeMismatch, "logits and labels differ in length");
  if (logits.size() < 10) fail(ErrorCode::kInsufficientData, "at least 10 samples are required");
  const std::size_t classes = logits.front().size();
  if (classes < 2) fail(ErrorCode::kInvalidArgument, "at least 2 classes are required");
  for (std::size_t s = 0; s < logits.size(); ++s) {
    if (logits[s].size() != classes) fail(ErrorCode::kShapeMismatch, "ragged logits");
    for (const double v : logits[s]) {
      if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteInput, "logit is not finite");
    }
    if (labels[s] < 0 || static_cast<std::size_t>(labels[s]) >= classes) {
      fail(ErrorCode::kIndexOutOfRange, "label out of range");
    }
  }
  if (std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); })) {
    fail(ErrorCode::kDegenerateLabels, "all labels belong to one class");
  }

  const auto nll_at_log = [&](double log_t) {
    return negative_log_likelihood(logits, labels, std::exp(log_t));
  };
  const double lo = std::log(kMinTemperature);
  const double hi = std::log(kMaxTemperature);
  constexpr int kScan = 200;
  const double step = (hi - lo) / kScan;
  int best_i = 0;
  double best = nll_at_log(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double v = nll_at_log(lo + step * i);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  double a = lo + step * std::max(0, best_i - 1);
  double b = lo + step * std::min(kScan, best_i + 1);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = nll_at_log(c);
  double fd = nll_at_log(d);
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = nll_at_log(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = nll_at_log(d);
    }
  }
  double log_t = (a + b) / 2.0;
  double value = nll_at_log(log_t);
  if (best < value) {
    value = best;
    log_t = lo + step * best_i;
  }
  TemperatureFit fit;
  fit.nll_at_one = negative_log_likelihood(logits, labels, 1.0);
  fit.temperature = std::exp(log_t);
  fit.nll = value;
  if (fit.nll_at_one < fit.nll) {
    fit.temperature = 1.0;
    fit.nll = fit.nll_at_one;
  }
  return fit;
}

}  // namespace senseplane::decision
