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

#include <filesystem>
#include <string>

#include "senseplane/codec/codebook.hpp"

namespace senseplane::codec {

// Flat little-endian layout:
//   "CSCB" | version u16 | V u32 | d u32 | decay f64 | beta f64 |
//   vectors (V*d f64, row-major) | ema_counts (V f64) | ema_sums (V*d f64)
inline constexpr std::uint16_t kCodebookFormatVersion = 1;

std::string serialize_codebook(const Codebook& codebook);
Codebook deserialize_codebook(std::string_view bytes);

void save_codebook(const Codebook& codebook, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace senseplane::codec
