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
#include <string>
#include <vector>

#include "senseplane/codec/codebook.hpp"
#include "senseplane/codec/encoder.hpp"

namespace senseplane::codec {

inline constexpr std::size_t kMaxCodes = 64;

// The discrete semantic interface between sensing and language.
struct CodeSequence {
  std::string window_id;
  std::vector<std::uint32_t> codes;
  std::int64_t timestamp_ms = 0;
  std::vector<bool> modality_presence;
  double confidence = 0.0;
  std::string site_id;

  bool operator==(const CodeSequence&) const = default;
};

struct QuantizeResult {
  CodeSequence sequence;
  double vq_loss = 0.0;
  // Pre-quantization embeddings u_k and their squared distances to the
  // selected codes.
  std::vector<std::vector<double>> pooled;
  std::vector<double> distances;
};

// Index of the nearest code by squared Euclidean distance; ties go to the
// lowest index.
std::uint32_t nearest_code(const Codebook& codebook, std::span<const double> embedding,
                           double* distance = nullptr);

// Mean-pools the L latent frames into `codes_per_window` equal-width segments.
std::vector<std::vector<double>> pool_segments(const RowMatrix& features,
                                               std::size_t codes_per_window);

// Quantizes a window. The reported loss collapses the stop-gradient structure
// of the VQ objective: sum_k ||u_k - c_{z_k}||^2 * (1 + beta).
QuantizeResult quantize(const FeatureWindow& window, const Codebook& codebook,
                        std::size_t codes_per_window = 16);

// Maps codes back to their code vectors as a K-frame window.
FeatureWindow decode(const CodeSequence& sequence, const Codebook& codebook);

// Stable digest input for caches keyed by code sequence.
std::string code_key(const CodeSequence& sequence);

}  // namespace senseplane::codec
