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

#include "senseplane/codec/codebook_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "senseplane/error.hpp"

namespace senseplane::codec {
namespace {

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    if (pos_ + sizeof(T) > bytes_.size()) fail(ErrorCode::kFormatError, "codebook file truncated");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::string_view take(std::size_t n) {
    if (pos_ + n > bytes_.size()) fail(ErrorCode::kFormatError, "codebook file truncated");
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_codebook(const Codebook& codebook) {
  std::string out = "CSCB";
  put_le<std::uint16_t>(out, kCodebookFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(codebook.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(codebook.dim()));
  put_le<double>(out, codebook.decay());
  put_le<double>(out, codebook.commitment_beta());
  for (const double v : codebook.vectors().data()) put_le<double>(out, v);
  for (const double v : codebook.ema_counts()) put_le<double>(out, v);
  for (const double v : codebook.ema_sums().data()) put_le<double>(out, v);
  return out;
}

Codebook deserialize_codebook(std::string_view bytes) {
  Reader reader(bytes);
  if (reader.take(4) != "CSCB") fail(ErrorCode::kFormatError, "bad codebook magic");
  const auto version = reader.get<std::uint16_t>();
  if (version != kCodebookFormatVersion) {
    fail(ErrorCode::kFormatError, "unsupported codebook version " + std::to_string(version));
  }
  const auto v = reader.get<std::uint32_t>();
  const auto d = reader.get<std::uint32_t>();
  CodebookConfig config;
  config.decay = reader.get<double>();
  config.commitment_beta = reader.get<double>();
  RowMatrix vectors(v, d);
  for (double& x : vectors.data()) x = reader.get<double>();
  Codebook codebook(std::move(vectors), config);
  for (double& x : codebook.mutable_ema_counts()) x = reader.get<double>();
  for (double& x : codebook.mutable_ema_sums().data()) x = reader.get<double>();
  if (!reader.done()) fail(ErrorCode::kFormatError, "trailing bytes after codebook payload");
  return codebook;
}

void save_codebook(const Codebook& codebook, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path.string());
  const std::string bytes = serialize_codebook(codebook);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_codebook(bytes);
}

}  // namespace senseplane::codec
