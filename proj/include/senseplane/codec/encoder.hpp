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

#include "senseplane/matrix.hpp"

namespace senseplane::codec {

// A raw sensor window: `steps` rows of `modalities * channels_per_modality`
// values. Channels of modality m occupy columns [m*c, (m+1)*c).
struct RawWindowRecord {
  std::string window_id;
  std::int64_t timestamp_ms = 0;
  std::size_t steps = 0;
  std::size_t modalities = 0;
  std::size_t channels_per_modality = 0;
  std::vector<double> values;
  std::vector<bool> modality_mask;
  std::string site_id;
};

struct EncoderConfig {
  std::size_t modalities = 4;
  std::size_t channels_per_modality = 8;
  std::size_t latent_dim = 16;
  std::size_t latent_frames = 16;
  std::uint64_t seed = 0x5E45E;
};

struct FeatureWindow {
  std::string window_id;
  std::int64_t timestamp_ms = 0;
  RowMatrix features;  // latent_frames x latent_dim
  std::vector<bool> modality_mask;
  std::string site_id;
};

// Desk-scale stand-in for learned modality adapters plus fusion: a fixed-seed
// Gaussian random projection of every step followed by equal-width mean
// pooling into `latent_frames` frames. Absent modalities contribute zeros.
class WindowEncoder {
 public:
  explicit WindowEncoder(EncoderConfig config);

  FeatureWindow encode(const RawWindowRecord& raw) const;

  const EncoderConfig& config() const { return config_; }
  const RowMatrix& projection() const { return projection_; }

 private:
  EncoderConfig config_;
  RowMatrix projection_;  // (modalities * channels) x latent_dim
};

FeatureWindow encode_window(const RawWindowRecord& raw, const EncoderConfig& config);

// Equal-width segment boundaries used for every pooling step in the codec:
// segment s of n over `length` items covers [floor(s*length/n), floor((s+1)*length/n)).
std::pair<std::size_t, std::size_t> segment_bounds(std::size_t segment, std::size_t segments,
                                                   std::size_t length);

}  // namespace senseplane::codec
