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

// RIFF/WAVE reader and writer restricted to 16-bit PCM, mono, 16 kHz.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nesc/error.hpp"
#include "nesc/framing.hpp"
#include "nesc/tensor_map.hpp"

namespace nesc {

inline AudioBuffer parse_wav(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorKind::kMalformedRiff);
  auto tag = [&](const char* expected) {
    auto t = r.take(4);
    return std::equal(t.begin(), t.end(), expected);
  };
  require(tag("RIFF"), ErrorKind::kMalformedRiff, "missing RIFF tag");
  r.u32();  // riff size, not trusted
  require(tag("WAVE"), ErrorKind::kMalformedRiff, "missing WAVE tag");

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  while (r.remaining() >= 8) {
    auto id = r.take(4);
    const std::string chunk(id.begin(), id.end());
    const std::uint32_t size = r.u32();
    if (chunk == "fmt ") {
      require(size >= 16, ErrorKind::kMalformedRiff, "fmt chunk too small");
      auto body = r.take(size);
      detail::ByteReader f(body, ErrorKind::kMalformedRiff);
      const std::uint16_t format = f.u16();
      channels = f.u16();
      rate = f.u32();
      f.u32();  // byte rate
      f.u16();  // block align
      bits = f.u16();
      require(format == 1, ErrorKind::kUnsupportedFormat,
              "only PCM (format tag 1) is supported, got " + std::to_string(format));
      require(channels == 1, ErrorKind::kUnsupportedFormat,
              "only mono is supported, got " + std::to_string(channels) + " channels");
      require(bits == 16, ErrorKind::kUnsupportedFormat,
              "only 16-bit samples are supported, got " + std::to_string(bits));
      require(rate == static_cast<std::uint32_t>(kSampleRateHz), ErrorKind::kUnsupportedFormat,
              "only 16000 Hz is supported, got " + std::to_string(rate));
      have_fmt = true;
      if (size % 2) r.take(1);
    } else if (chunk == "data") {
      require(have_fmt, ErrorKind::kMalformedRiff, "data chunk before fmt chunk");
      require(size % 2 == 0, ErrorKind::kMalformedRiff, "odd data size for 16-bit PCM");
      auto body = r.take(size);
      AudioBuffer audio;
      audio.sample_rate_hz = static_cast<int>(rate);
      audio.samples.resize(size / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(body[2 * i] | (body[2 * i + 1] << 8));
        audio.samples[i] = static_cast<float>(v) / 32768.0f;
      }
      return audio;
    } else {
      r.take(size + (size % 2));
    }
  }
  fail(ErrorKind::kMalformedRiff, "no data chunk");
}

inline std::int16_t to_pcm16(float x) {
  const float scaled = std::nearbyint(x * 32768.0f);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0f, 32767.0f));
}

/// Canonical 44-byte header followed by the samples, saturated to int16.
inline std::vector<std::uint8_t> serialize_wav(const AudioBuffer& audio) {
  require(audio.sample_rate_hz == kSampleRateHz, ErrorKind::kUnsupportedFormat,
          "only 16000 Hz output is supported");
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  detail::ByteWriter w;
  w.text("RIFF");
  w.u32(36 + data_bytes);
  w.text("WAVE");
  w.text("fmt ");
  w.u32(16);
  w.u16(1);
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(audio.sample_rate_hz));
  w.u32(static_cast<std::uint32_t>(audio.sample_rate_hz) * 2);
  w.u16(2);
  w.u16(16);
  w.text("data");
  w.u32(data_bytes);
  for (float s : audio.samples) w.u16(static_cast<std::uint16_t>(to_pcm16(s)));
  return std::move(w.bytes());
}

inline AudioBuffer read_wav(const std::filesystem::path& path) { return parse_wav(read_file(path)); }

inline void write_wav(const AudioBuffer& audio, const std::filesystem::path& path) {
  write_file(path, serialize_wav(audio));
}

}  // namespace nesc
