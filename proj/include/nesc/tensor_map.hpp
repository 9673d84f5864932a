// Copyright 2026 The NESC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Named tensor container and its on-disk form.
//
// File layout (all integers little-endian):
//   "NESW" | u8 version (1) | u32 tensor_count
//   per tensor: u16 name_len | name bytes (UTF-8) | u8 rank | u32 dims[rank]
//               | f32 data[product(dims)]
//   u32 CRC-32 (zlib polynomial) of every preceding byte

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nesc/error.hpp"

namespace nesc {

using Shape = std::vector<std::uint32_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t b) { return a * b; });
}

inline std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<float> data;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Insertion-ordered map of named float tensors.
class TensorMap {
 public:
  void insert(std::string name, Shape shape, std::vector<float> data) {
    require(!contains(name), ErrorKind::kDuplicateName, "tensor '" + name + "' already present");
    require(data.size() == shape_size(shape), ErrorKind::kShapeMismatch,
            "tensor '" + name + "' has " + std::to_string(data.size()) +
                " values for shape " + shape_string(shape));
    index_.emplace(name, entries_.size());
    entries_.push_back({std::move(name), std::move(shape), std::move(data)});
  }

  /// Replaces an existing tensor's values; the shape must not change.
  void assign(const std::string& name, std::vector<float> data) {
    NamedTensor& t = mutable_get(name);
    require(data.size() == t.data.size(), ErrorKind::kShapeMismatch,
            "tensor '" + name + "' size mismatch on assign");
    t.data = std::move(data);
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const NamedTensor& get(const std::string& name) const {
    auto it = index_.find(name);
    require(it != index_.end(), ErrorKind::kMissingTensor, "tensor '" + name + "' not found");
    return entries_[it->second];
  }

  /// Looks up `name` and checks its shape; errors name the offending tensor.
  const std::vector<float>& expect(const std::string& name, const Shape& shape) const {
    const NamedTensor& t = get(name);
    require(t.shape == shape, ErrorKind::kShapeMismatch,
            "tensor '" + name + "' has shape " + shape_string(t.shape) + ", expected " +
                shape_string(shape));
    return t.data;
  }

  const std::vector<NamedTensor>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.data.size();
    return n;
  }

  friend bool operator==(const TensorMap& a, const TensorMap& b) {
    return a.entries_ == b.entries_;
  }

 private:
  NamedTensor& mutable_get(const std::string& name) {
    auto it = index_.find(name);
    require(it != index_.end(), ErrorKind::kMissingTensor, "tensor '" + name + "' not found");
    return entries_[it->second];
  }

  std::vector<NamedTensor> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TensorSpec {
  std::string name;
  Shape shape;
};

/// Required tensor names and shapes for one model configuration.
struct Manifest {
  std::vector<TensorSpec> tensors;

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += shape_size(t.shape);
    return n;
  }

  void append(const Manifest& other) {
    tensors.insert(tensors.end(), other.tensors.begin(), other.tensors.end());
  }

  /// Throws kMissingTensor / kShapeMismatch naming the first offender.
  void validate(const TensorMap& map) const {
    for (const auto& spec : tensors) map.expect(spec.name, spec.shape);
  }
};

namespace detail {

inline constexpr char kWeightsMagic[4] = {'N', 'E', 'S', 'W'};
inline constexpr std::uint8_t kWeightsVersion = 1;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }
  void text(const std::string& s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data, ErrorKind short_read)
      : data_(data), short_read_(short_read) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    auto b = take(4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::span<const std::uint8_t> take(std::size_t n) {
    require(remaining() >= n, short_read_, "unexpected end of data");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  ErrorKind short_read_;
};

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

}  // namespace detail

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

inline std::vector<std::uint8_t> serialize_weights(const TensorMap& map) {
  detail::ByteWriter w;
  for (char c : detail::kWeightsMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u8(detail::kWeightsVersion);
  w.u32(static_cast<std::uint32_t>(map.size()));
  for (const auto& t : map.entries()) {
    require(t.name.size() <= 0xFFFF, ErrorKind::kInvalidArgument, "tensor name too long");
    require(t.shape.size() <= 0xFF, ErrorKind::kInvalidArgument, "tensor rank too large");
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.text(t.name);
    w.u8(static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) w.u32(d);
    for (float v : t.data) w.f32(v);
  }
  const std::uint32_t crc = detail::crc32_of(w.bytes());
  w.u32(crc);
  return std::move(w.bytes());
}

inline TensorMap deserialize_weights(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorKind::kTruncated);
  auto magic = r.take(4);
  require(std::equal(magic.begin(), magic.end(), std::begin(detail::kWeightsMagic)),
          ErrorKind::kBadMagic, "not a weights file");
  require(r.u8() == detail::kWeightsVersion, ErrorKind::kBadVersion, "unsupported weights version");
  const std::uint32_t count = r.u32();
  std::vector<NamedTensor> parsed;
  for (std::uint32_t n = 0; n < count; ++n) {
    NamedTensor t;
    const std::uint16_t len = r.u16();
    auto name = r.take(len);
    t.name.assign(name.begin(), name.end());
    const std::uint8_t rank = r.u8();
    for (std::uint8_t d = 0; d < rank; ++d) t.shape.push_back(r.u32());
    const std::size_t n_values = shape_size(t.shape);
    require(r.remaining() >= 4 * n_values, ErrorKind::kTruncated,
            "tensor '" + t.name + "' data truncated");
    t.data.resize(n_values);
    for (auto& v : t.data) v = r.f32();
    parsed.push_back(std::move(t));
  }
  const std::size_t payload_end = r.position();
  const std::uint32_t stored = r.u32();
  require(r.remaining() == 0, ErrorKind::kLengthMismatch, "trailing bytes after weights footer");
  require(stored == detail::crc32_of(bytes.first(payload_end)), ErrorKind::kChecksumMismatch,
          "weights checksum mismatch");
  TensorMap map;
  for (auto& t : parsed) map.insert(std::move(t.name), std::move(t.shape), std::move(t.data));
  return map;
}

inline void save_weights(const TensorMap& map, const std::filesystem::path& path) {
  write_file(path, serialize_weights(map));
}

inline TensorMap load_weights(const std::filesystem::path& path) {
  return deserialize_weights(read_file(path));
}

/// 64-bit linear congruential generator (Knuth MMIX constants, modulus 2^64)
/// seeded with `seed` directly; tensors are filled in manifest order, row-major.
/// Each value uses the top 24 state bits: u = (state >> 40) / 2^24, and is
/// stored as (2u - 1) / sqrt(fan_in), where fan_in is the product of all dims
/// but the first (rank >= 2) or the single dim (rank 1).
using WeightsRng =
    std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL, 1442695040888963407ULL, 0>;

inline std::size_t fan_in(const Shape& shape) {
  if (shape.empty()) return 1;
  if (shape.size() == 1) return std::max<std::size_t>(1, shape[0]);
  return std::max<std::size_t>(1, shape_size(shape) / shape[0]);
}

inline TensorMap random_weights(const Manifest& manifest, std::uint64_t seed) {
  WeightsRng rng(seed);
  TensorMap map;
  for (const auto& spec : manifest.tensors) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in(spec.shape)));
    std::vector<float> data(shape_size(spec.shape));
    for (auto& v : data) {
      const double u = static_cast<double>(rng() >> 40) / 16777216.0;
      v = static_cast<float>((2.0 * u - 1.0) * scale);
    }
    map.insert(spec.name, spec.shape, std::move(data));
  }
  return map;
}

inline TensorMap zero_weights(const Manifest& manifest) {
  TensorMap map;
  for (const auto& spec : manifest.tensors)
    map.insert(spec.name, spec.shape, std::vector<float>(shape_size(spec.shape), 0.0f));
  return map;
}

}  // namespace nesc
