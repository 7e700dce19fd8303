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

#include "senseplane/codec/encoder.hpp"

#include <cmath>

#include "senseplane/error.hpp"
#include "senseplane/random.hpp"

namespace senseplane::codec {

std::pair<std::size_t, std::size_t> segment_bounds(std::size_t segment, std::size_t segments,
                                                   std::size_t length) {
  return {segment * length / segments, (segment + 1) * length / segments};
}

WindowEncoder::WindowEncoder(EncoderConfig config) : config_(config) {
  if (config_.modalities == 0 || config_.channels_per_modality == 0 || config_.latent_dim == 0 ||
      config_.latent_frames == 0) {
    fail(ErrorCode::kInvalidArgument, "encoder dimensions must be positive");
  }
  const std::size_t in_dim = config_.modalities * config_.channels_per_modality;
  projection_ = RowMatrix(in_dim, config_.latent_dim);
  Rng rng(derive_seed(config_.seed, "encoder-projection"));
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (double& v : projection_.data()) v = rng.normal() * scale;
}

FeatureWindow WindowEncoder::encode(const RawWindowRecord& raw) const {
  if (raw.modalities != config_.modalities ||
      raw.channels_per_modality != config_.channels_per_modality) {
    fail(ErrorCode::kShapeMismatch, "raw window modality layout disagrees with encoder config");
  }
  const std::size_t width = raw.modalities * raw.channels_per_modality;
  if (raw.values.size() != raw.steps * width) {
    fail(ErrorCode::kShapeMismatch, "raw window value count disagrees with steps x channels");
  }
  if (raw.modality_mask.size() != raw.modalities) {
    fail(ErrorCode::kShapeMismatch, "modality mask length disagrees with modality count");
  }
  if (raw.steps < config_.latent_frames) {
    fail(ErrorCode::kShapeMismatch, "raw window shorter than the number of latent frames");
  }
  bool any_present = false;
  for (const bool present : raw.modality_mask) any_present = any_present || present;
  if (!any_present) fail(ErrorCode::kShapeMismatch, "modality mask has no present modality");
  for (const double v : raw.values) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteInput, "raw window contains NaN/Inf");
  }

  const std::size_t d = config_.latent_dim;
  RowMatrix projected(raw.steps, d);
  for (std::size_t t = 0; t < raw.steps; ++t) {
    auto out = projected.row(t);
    const double* x = raw.values.data() + t * width;
    for (std::size_t c = 0; c < width; ++c) {
      const bool present = raw.modality_mask[c / raw.channels_per_modality];
      const double value = present ? x[c] : 0.0;
      const auto p = projection_.row(c);
      for (std::size_t j = 0; j < d; ++j) out[j] += value * p[j];
    }
  }

  FeatureWindow window;
  window.window_id = raw.window_id;
  window.timestamp_ms = raw.timestamp_ms;
  window.modality_mask = raw.modality_mask;
  window.site_id = raw.site_id;
  window.features = RowMatrix(config_.latent_frames, d);
  for (std::size_t l = 0; l < config_.latent_frames; ++l) {
    const auto [begin, end] = segment_bounds(l, config_.latent_frames, raw.steps);
    auto frame = window.features.row(l);
    for (std::size_t t = begin; t < end; ++t) {
      const auto row = projected.row(t);
      for (std::size_t j = 0; j < d; ++j) frame[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (double& v : frame) v *= inv;
  }
  return window;
}

FeatureWindow encode_window(const RawWindowRecord& raw, const EncoderConfig& config) {
  return WindowEncoder(config).encode(raw);
}

}  // namespace senseplane::codec
