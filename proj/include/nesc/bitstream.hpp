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

// .nsc container.
//
//   offset 0  "NESC"
//          4  u8  version (1)
//          5  u32 sample rate, little-endian
//          9  u8  layers (1..3)
//         10  u32 packet count, little-endian
//         14  payload: packet-major, `layers` 10-bit indices per packet,
//             MSB first, zero-padded to a whole byte only at the very end.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nesc/error.hpp"
#include "nesc/framing.hpp"
#include "nesc/rvq.hpp"
#include "nesc/tensor_map.hpp"

namespace nesc {

inline constexpr std::uint8_t kBitstreamVersion = 1;
inline constexpr std::size_t kHeaderBytes = 14;

struct BitstreamHeader {
  std::uint8_t version = kBitstreamVersion;
  std::uint32_t sample_rate_hz = kSampleRateHz;
  std::uint8_t layers = 3;
  std::uint32_t packet_count = 0;

  friend bool operator==(const BitstreamHeader&, const BitstreamHeader&) = default;
};

inline std::size_t payload_bytes(std::size_t packets, std::size_t layers) {
  return (packets * layers * kIndexBits + 7) / 8;
}

class BitWriter {
 public:
  void write(std::uint32_t value, unsigned bits) {
    for (unsigned b = bits; b-- > 0;) {
      if (fill_ == 0) bytes_.push_back(0);
      if ((value >> b) & 1u) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> fill_);
      fill_ = (fill_ + 1) % 8;
      ++bit_count_;
    }
  }
  std::size_t bit_count() const noexcept { return bit_count_; }
  std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  unsigned fill_ = 0;
  std::size_t bit_count_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t read(unsigned bits) {
    std::uint32_t v = 0;
    for (unsigned b = 0; b < bits; ++b) {
      require(pos_ / 8 < bytes_.size(), ErrorKind::kLengthMismatch, "payload exhausted");
      const unsigned bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
      v = (v << 1) | bit;
      ++pos_;
    }
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// Serialises the first `layers` indices of every packet.
inline std::vector<std::uint8_t> pack(std::span<const PacketCodes> codes, std::size_t layers,
                                      std::uint32_t sample_rate_hz = kSampleRateHz) {
  require(layers >= 1 && layers <= kMaxLayers, ErrorKind::kInvalidLayers,
          "layers must be in [1, 3], got " + std::to_string(layers));
  detail::ByteWriter w;
  w.text("NESC");
  w.u8(kBitstreamVersion);
  w.u32(sample_rate_hz);
  w.u8(static_cast<std::uint8_t>(layers));
  w.u32(static_cast<std::uint32_t>(codes.size()));
  BitWriter bits;
  for (std::size_t p = 0; p < codes.size(); ++p) {
    require(codes[p].layers() >= layers, ErrorKind::kInvalidLayers,
            "packet " + std::to_string(p) + " has " + std::to_string(codes[p].layers()) +
                " indices, need " + std::to_string(layers));
    for (std::size_t l = 0; l < layers; ++l) {
      require(codes[p].indices[l] < (1u << kIndexBits), ErrorKind::kInvalidArgument,
              "index does not fit in 10 bits");
      bits.write(codes[p].indices[l], kIndexBits);
    }
  }
  w.raw(bits.bytes());
  return std::move(w.bytes());
}

inline BitstreamHeader parse_header(std::span<const std::uint8_t> data) {
  require(data.size() >= kHeaderBytes, ErrorKind::kLengthMismatch, "stream shorter than header");
  detail::ByteReader r(data, ErrorKind::kLengthMismatch);
  auto magic = r.take(4);
  require(std::string(magic.begin(), magic.end()) == "NESC", ErrorKind::kBadMagic,
          "not an .nsc stream");
  BitstreamHeader h;
  h.version = r.u8();
  require(h.version == kBitstreamVersion, ErrorKind::kBadVersion,
          "unsupported stream version " + std::to_string(h.version));
  h.sample_rate_hz = r.u32();
  h.layers = r.u8();
  require(h.layers >= 1 && h.layers <= kMaxLayers, ErrorKind::kInvalidLayers,
          "header declares " + std::to_string(h.layers) + " layers");
  h.packet_count = r.u32();
  const std::size_t expected = kHeaderBytes + payload_bytes(h.packet_count, h.layers);
  require(data.size() == expected, ErrorKind::kLengthMismatch,
          "stream is " + std::to_string(data.size()) + " bytes, header implies " +
              std::to_string(expected));
  return h;
}

inline std::pair<BitstreamHeader, std::vector<PacketCodes>> unpack(std::span<const std::uint8_t> data) {
  BitstreamHeader h = parse_header(data);
  BitReader bits(data.subspan(kHeaderBytes));
  std::vector<PacketCodes> codes(h.packet_count);
  for (auto& c : codes) {
    c.indices.resize(h.layers);
    for (auto& idx : c.indices) idx = static_cast<std::uint16_t>(bits.read(kIndexBits));
  }
  return {h, std::move(codes)};
}

/// Keeps the first `new_layers` indices of every packet.
inline std::vector<std::uint8_t> truncate_layers(std::span<const std::uint8_t> data,
                                                 std::size_t new_layers) {
  auto [header, codes] = unpack(data);
  require(new_layers >= 1 && new_layers <= header.layers, ErrorKind::kInvalidLayers,
          "cannot keep " + std::to_string(new_layers) + " of " + std::to_string(header.layers) +
              " layers");
  return pack(codes, new_layers, header.sample_rate_hz);
}

}  // namespace nesc
