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

#include "senseplane/codec/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "senseplane/error.hpp"

namespace senseplane::codec {

double alignment_loss(const AlignmentBatch& batch) {
  const std::size_t b = batch.pooled.rows();
  if (b == 0) fail(ErrorCode::kInvalidArgument, "alignment batch is empty");
  if (batch.text.rows() != b || batch.text.cols() != batch.pooled.cols()) {
    fail(ErrorCode::kShapeMismatch, "pooled and text matrices differ in shape");
  }
  if (!(batch.temperature > 0.0)) fail(ErrorCode::kInvalidArgument, "temperature must be > 0");

  std::vector<double> logits(b);
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      logits[j] = dot(batch.pooled.row(i), batch.text.row(j)) / batch.temperature;
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (const double l : logits) denom += std::exp(l - peak);
    total += std::log(denom) - (logits[i] - peak);
  }
  const double loss = total / static_cast<double>(b);
  if (!std::isfinite(loss)) fail(ErrorCode::kNonFiniteResult, "alignment loss is not finite");
  return std::max(loss, 0.0);
}

}  // namespace senseplane::codec
