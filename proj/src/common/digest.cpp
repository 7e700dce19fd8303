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

#include "senseplane/digest.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

#include "senseplane/error.hpp"

namespace senseplane {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) fail(ErrorCode::kIoError, "libsodium initialisation failed");
  });
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string Digest128::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(32, '0');
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out[2 * i] = kDigits[bytes[i] >> 4];
    out[2 * i + 1] = kDigits[bytes[i] & 0xF];
  }
  return out;
}

Digest128 Digest128::from_hex(std::string_view hex) {
  if (hex.size() != 32) fail(ErrorCode::kFormatError, "digest hex must be 32 chars");
  Digest128 d;
  for (std::size_t i = 0; i < 16; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::kFormatError, "invalid hex digit in digest");
    d.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return d;
}

std::size_t Digest128Hash::operator()(const Digest128& d) const noexcept {
  std::size_t h;
  std::memcpy(&h, d.bytes.data(), sizeof(h));
  return h;
}

Digest128 digest128(std::string_view data) {
  ensure_sodium();
  Digest128 d;
  crypto_generichash(d.bytes.data(), d.bytes.size(),
                     reinterpret_cast<const unsigned char*>(data.data()), data.size(), nullptr, 0);
  return d;
}

DigestBuilder::DigestBuilder(std::string_view key) : key_(key) {}

DigestBuilder& DigestBuilder::add(std::string_view field) {
  add(static_cast<std::uint64_t>(field.size()));
  buffer_.append(field);
  return *this;
}

DigestBuilder& DigestBuilder::add(std::uint64_t value) {
  for (int i = 0; i < 8; ++i) buffer_.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  return *this;
}

Digest128 DigestBuilder::finish() {
  if (key_.empty()) return digest128(buffer_);
  const auto raw = keyed_hash(key_, buffer_, 16);
  Digest128 d;
  std::memcpy(d.bytes.data(), raw.data(), 16);
  return d;
}

std::vector<std::uint8_t> keyed_hash(std::string_view key, std::string_view data,
                                     std::size_t out_len) {
  ensure_sodium();
  if (out_len < crypto_generichash_BYTES_MIN || out_len > crypto_generichash_BYTES_MAX) {
    fail(ErrorCode::kInvalidArgument, "keyed_hash output length out of range");
  }
  // BLAKE2b keys are limited to 64 bytes; longer keys are compressed first.
  std::string k(key);
  if (k.size() > crypto_generichash_KEYBYTES_MAX) {
    const Digest128 d = digest128(k);
    k.assign(reinterpret_cast<const char*>(d.bytes.data()), d.bytes.size());
  }
  std::vector<std::uint8_t> out(out_len);
  crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(data.data()),
                     data.size(), reinterpret_cast<const unsigned char*>(k.data()), k.size());
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> data) {
  ensure_sodium();
  const std::size_t len = sodium_base64_encoded_len(data.size(), sodium_base64_VARIANT_ORIGINAL);
  std::string out(len, '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(),
                    sodium_base64_VARIANT_ORIGINAL);
  out.resize(std::strlen(out.c_str()));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  ensure_sodium();
  std::vector<std::uint8_t> out(text.size() * 3 / 4 + 3);
  std::size_t written = 0;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &written,
                        nullptr, sodium_base64_VARIANT_ORIGINAL) != 0) {
    fail(ErrorCode::kFormatError, "invalid base64 payload");
  }
  out.resize(written);
  return out;
}

}  // namespace senseplane
