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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace senseplane {

// 128-bit BLAKE2b digest. Used for semantic cache keys, prompt checksums and
// audit record checksums.
struct Digest128 {
  std::array<std::uint8_t, 16> bytes{};

  std::string hex() const;
  static Digest128 from_hex(std::string_view hex);
  auto operator<=>(const Digest128&) const = default;
};

struct Digest128Hash {
  std::size_t operator()(const Digest128& d) const noexcept;
};

Digest128 digest128(std::string_view data);

// Incremental hashing with a length-prefixed field framing, so distinct field
// sequences never collide by concatenation.
class DigestBuilder {
 public:
  explicit DigestBuilder(std::string_view key = {});
  DigestBuilder& add(std::string_view field);
  DigestBuilder& add(std::uint64_t value);
  Digest128 finish();

 private:
  std::string buffer_;
  std::string key_;
};

// Keyed BLAKE2b producing `out_len` bytes (16..64).
std::vector<std::uint8_t> keyed_hash(std::string_view key, std::string_view data,
                                     std::size_t out_len = 16);

std::string base64_encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace senseplane
