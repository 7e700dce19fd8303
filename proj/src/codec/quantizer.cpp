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

#include "senseplane/codec/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "senseplane/error.hpp"

namespace senseplane::codec {

std::uint32_t nearest_code(const Codebook& codebook, std::span<const double> embedding,
                           double* distance) {
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_index = 0;
  for (std::uint32_t i = 0; i < codebook.size(); ++i) {
    const double dist = squared_distance(embedding, codebook.vector(i));
    if (dist < best) {
      best = dist;
      best_index = i;
    }
  }
  if (distance != nullptr) *distance = best;
  return best_index;
}

std::vector<std::vector<double>> pool_segments(const RowMatrix& features,
                                               std::size_t codes_per_window) {
  const std::size_t frames = features.rows();
  if (codes_per_window == 0 || codes_per_window > kMaxCodes) {
    fail(ErrorCode::kInvalidArgument, "codes per window must be in [1, 64]");
  }
  if (codes_per_window > frames) {
    fail(ErrorCode::kDimensionMismatch, "more codes requested than latent frames");
  }
  std::vector<std::vector<double>> pooled(codes_per_window,
                                          std::vector<double>(features.cols(), 0.0));
  for (std::size_t k = 0; k < codes_per_window; ++k) {
    const auto [begin, end] = segment_bounds(k, codes_per_window, frames);
    for (std::size_t l = begin; l < end; ++l) {
      const auto row = features.row(l);
      for (std::size_t j = 0; j < row.size(); ++j) pooled[k][j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (double& v : pooled[k]) v *= inv;
  }
  return pooled;
}

QuantizeResult quantize(const FeatureWindow& window, const Codebook& codebook,
                        std::size_t codes_per_window) {
  if (codebook.size() == 0) fail(ErrorCode::kEmptyCodebook, "codebook is empty");
  if (window.features.cols() != codebook.dim()) {
    fail(ErrorCode::kDimensionMismatch, "window dimension differs from codebook dimension");
  }
  QuantizeResult result;
  result.pooled = pool_segments(window.features, codes_per_window);
  result.sequence.window_id = window.window_id;
  result.sequence.timestamp_ms = window.timestamp_ms;
  result.sequence.modality_presence = window.modality_mask;
  result.sequence.site_id = window.site_id;
  result.sequence.codes.reserve(codes_per_window);
  result.distances.reserve(codes_per_window);

  double total = 0.0;
  for (const auto& u : result.pooled) {
    double dist = 0.0;
    result.sequence.codes.push_back(nearest_code(codebook, u, &dist));
    result.distances.push_back(dist);
    total += dist;
  }
  result.vq_loss = total * (1.0 + codebook.commitment_beta());
  const double mean = total / static_cast<double>(codes_per_window);
  const double scale = codebook.distance_scale();
  result.sequence.confidence = std::clamp(std::exp(-mean / scale), 0.0, 1.0);
  return result;
}

FeatureWindow decode(const CodeSequence& sequence, const Codebook& codebook) {
  FeatureWindow window;
  window.window_id = sequence.window_id;
  window.timestamp_ms = sequence.timestamp_ms;
  window.modality_mask = sequence.modality_presence;
  window.site_id = sequence.site_id;
  window.features = RowMatrix(sequence.codes.size(), codebook.dim());
  for (std::size_t k = 0; k < sequence.codes.size(); ++k) {
    if (sequence.codes[k] >= codebook.size()) {
      fail(ErrorCode::kIndexOutOfRange, "code outside codebook");
    }
    const auto v = codebook.vector(sequence.codes[k]);
    std::copy(v.begin(), v.end(), window.features.row(k).begin());
  }
  return window;
}

std::string code_key(const CodeSequence& sequence) {
  std::string key;
  key.reserve(sequence.codes.size() * 4);
  for (const std::uint32_t c : sequence.codes) {
    key += std::to_string(c);
    key += ',';
  }
  return key;
}

}  // namespace senseplane::codec
