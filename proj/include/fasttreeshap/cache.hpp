/*
 * Copyright 2026 The FastTreeSHAP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// On-disk store for subset-weight tables, so a fixed model can explain new
// batches without rebuilding them.
//
// Layout (all integers little-endian):
//   "FTS2"              4 bytes magic
//   version             u32
//   model digest        32 bytes, SHA-256 of CanonicalJson(model)
//   tree count          u32
//   per tree:
//     depth             u32
//     leaf count        u32
//     e length          u32
//     e entries         i32 x e length
//     table             f64 x (leaf count * 2^depth), row-major

#ifndef FASTTREESHAP_CACHE_HPP_
#define FASTTREESHAP_CACHE_HPP_

#include <openssl/sha.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fasttreeshap/error.hpp"
#include "fasttreeshap/fastv2.hpp"
#include "fasttreeshap/model.hpp"

namespace fasttreeshap::cache {

inline constexpr std::string_view kMagic = "FTS2";
inline constexpr std::uint32_t kFormatVersion = 1;

using Digest = std::array<std::uint8_t, 32>;

inline Digest Sha256(std::string_view bytes) {
  Digest out;
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
         out.data());
  return out;
}

inline Digest ModelDigest(const Ensemble& e) { return Sha256(CanonicalJson(e)); }

inline std::string ToHex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (auto b : d) {
    out += kHex[b >> 4];
    out += kHex[b & 0xf];
  }
  return out;
}

namespace detail {

class Writer {
 public:
  void Bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    buffer_.append(p, n);
  }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buffer_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void I32(std::int32_t v) { U32(static_cast<std::uint32_t>(v)); }
  void F64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      buffer_.push_back(static_cast<char>(bits >> (8 * i)));
    }
  }
  const std::string& buffer() const { return buffer_; }

 private:
  std::string buffer_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view Bytes(std::size_t n) {
    Need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::int32_t I32() { return static_cast<std::int32_t>(U32()); }
  double F64() {
    Need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
              << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw CacheError(CacheError::Kind::kTruncated,
                       "cache file is truncated");
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string EncodeCache(std::span<const fastv2::PrepTable> tables,
                               const Digest& digest) {
  detail::Writer w;
  w.Bytes(kMagic.data(), kMagic.size());
  w.U32(kFormatVersion);
  w.Bytes(digest.data(), digest.size());
  w.U32(static_cast<std::uint32_t>(tables.size()));
  for (const auto& t : tables) {
    w.U32(static_cast<std::uint32_t>(t.depth));
    w.U32(static_cast<std::uint32_t>(t.leaves));
    w.U32(static_cast<std::uint32_t>(t.duplicate_position.size()));
    for (auto e : t.duplicate_position) w.I32(e);
    for (double v : t.s) w.F64(v);
  }
  return w.buffer();
}

// Decodes a cache and checks it was built for the model with `expected`
// digest.
inline std::vector<fastv2::PrepTable> DecodeCache(std::string_view data,
                                                  const Digest& expected) {
  detail::Reader r(data);
  if (r.Bytes(kMagic.size()) != kMagic) {
    throw CacheError(CacheError::Kind::kBadMagic, "not a subset-weight cache");
  }
  const std::uint32_t version = r.U32();
  if (version != kFormatVersion) {
    throw CacheError(CacheError::Kind::kVersionMismatch,
                     "cache format version " + std::to_string(version) +
                         ", expected " + std::to_string(kFormatVersion));
  }
  Digest digest;
  const auto raw = r.Bytes(digest.size());
  std::memcpy(digest.data(), raw.data(), digest.size());
  if (digest != expected) {
    throw CacheError(CacheError::Kind::kDigestMismatch,
                     "cache was built for a different model (digest " +
                         ToHex(digest) + ", model " + ToHex(expected) + ")");
  }
  const std::uint32_t count = r.U32();
  std::vector<fastv2::PrepTable> tables;
  for (std::uint32_t i = 0; i < count; ++i) {
    fastv2::PrepTable t;
    t.depth = static_cast<int>(r.U32());
    t.leaves = static_cast<int>(r.U32());
    if (t.depth > fastv2::kMaxTableDepth) {
      throw CacheError(CacheError::Kind::kModelMismatch,
                       "cache table depth out of range");
    }
    const std::uint32_t e_len = r.U32();
    if (r.remaining() / 4 < e_len) {
      throw CacheError(CacheError::Kind::kTruncated, "cache file is truncated");
    }
    t.duplicate_position.resize(e_len);
    for (auto& e : t.duplicate_position) e = r.I32();
    const std::size_t cells = static_cast<std::size_t>(t.leaves) << t.depth;
    if (r.remaining() / 8 < cells) {
      throw CacheError(CacheError::Kind::kTruncated, "cache file is truncated");
    }
    t.s.resize(cells);
    for (auto& v : t.s) v = r.F64();
    tables.push_back(std::move(t));
  }
  return tables;
}

inline void SaveCache(std::span<const fastv2::PrepTable> tables,
                      const Digest& digest, const std::filesystem::path& path) {
  const std::string bytes = EncodeCache(tables, digest);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CacheError(CacheError::Kind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CacheError(CacheError::Kind::kIo, "write failed for " + path.string());
}

inline std::vector<fastv2::PrepTable> LoadCache(const std::filesystem::path& path,
                                                const Digest& expected) {
  std::string bytes;
  try {
    bytes = ReadFile(path);
  } catch (const IoError& err) {
    throw CacheError(CacheError::Kind::kIo, err.what());
  }
  return DecodeCache(bytes, expected);
}

// Loads a cache for `model` and checks every table against its tree.
inline std::vector<fastv2::PrepTable> LoadCacheFor(const Ensemble& model,
                                                   const std::filesystem::path& path) {
  auto tables = LoadCache(path, ModelDigest(model));
  if (tables.size() != model.trees.size()) {
    throw CacheError(CacheError::Kind::kModelMismatch,
                     "cache holds " + std::to_string(tables.size()) +
                         " tables for a model with " +
                         std::to_string(model.trees.size()) + " trees");
  }
  for (std::size_t t = 0; t < tables.size(); ++t) {
    fastv2::CheckTableMatches(model.trees[t], tables[t]);
  }
  return tables;
}

}  // namespace fasttreeshap::cache

#endif  // FASTTREESHAP_CACHE_HPP_
