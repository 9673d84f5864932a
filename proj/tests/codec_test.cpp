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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_support.hpp"

namespace nesc {
namespace {

const Codec& small_codec() {
  static const Codec codec(testing::small_weights(), testing::small_config());
  return codec;
}

TEST(DelayReport, DefaultIs25Ms) {
  const auto r = compute_delay_report(FramingConfig{}, 100);
  EXPECT_DOUBLE_EQ(r.framing_lookahead_ms, 5.0);
  EXPECT_DOUBLE_EQ(r.frame_buffer_ms, 10.0);
  EXPECT_DOUBLE_EQ(r.encoder_side_ms(), 15.0);
  EXPECT_DOUBLE_EQ(r.decoder_ms, 10.0);
  EXPECT_DOUBLE_EQ(r.total_ms, 25.0);
}

TEST(DelayReport, ZeroLookahead) {
  FramingConfig f;
  f.lookahead_samples = 0;
  const auto r = compute_delay_report(f, 100);
  EXPECT_DOUBLE_EQ(r.framing_lookahead_ms, 0.0);
  EXPECT_DOUBLE_EQ(r.total_ms, 20.0);
}

TEST(DelayReport, DoubledHop) {
  FramingConfig f;
  f.hop_samples = 320;
  const auto r = compute_delay_report(f, 100);
  EXPECT_DOUBLE_EQ(r.frame_buffer_ms, 20.0);
  EXPECT_DOUBLE_EQ(r.total_ms, r.framing_lookahead_ms + r.frame_buffer_ms + r.decoder_ms);
}

TEST(DelayReport, LongerFilterAddsHops) {
  const auto r = compute_delay_report(FramingConfig{}, 400);
  EXPECT_DOUBLE_EQ(r.decoder_ms, 20.0);
}

TEST(Codec, PacketAndSampleCounts) {
  const auto audio = testing::white_noise(32000, 1);
  const auto codes = small_codec().encode(audio, 3);
  EXPECT_EQ(codes.size(), 200u);
  const auto out = small_codec().decode(codes);
  EXPECT_EQ(out.samples.size(), 32000u);
}

TEST(Codec, LengthPreservedWithinOneHop) {
  for (std::size_t n : {1u, 159u, 1000u, 4321u}) {
    const auto audio = testing::white_noise(n, n);
    const auto out = small_codec().decode(small_codec().encode(audio, 2));
    EXPECT_LT(out.samples.size() - n, 160u) << n;
    EXPECT_GE(out.samples.size(), n);
  }
}

TEST(Codec, SilenceEncodesAndDecodes) {
  AudioBuffer silence;
  silence.samples.assign(1600, 0.0f);
  const auto stream = small_codec().encode_to_stream(silence, 3);
  const auto out = small_codec().decode_stream(stream);
  EXPECT_EQ(out.samples.size(), 1600u);
  for (float v : out.samples) EXPECT_TRUE(std::isfinite(v));
}

TEST(Codec, BitrateLaw) {
  const auto audio = testing::white_noise(16000 * 3, 2);
  for (std::size_t layers = 1; layers <= 3; ++layers) {
    const auto stream = small_codec().encode_to_stream(audio, layers);
    EXPECT_EQ((stream.size() - kHeaderBytes) * 8, 300 * layers * 10);
  }
}

TEST(Codec, LayerSelectionEqualsTruncation) {
  const auto stream = small_codec().encode_to_stream(testing::white_noise(8000, 3), 3);
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto a = small_codec().decode_stream(stream, k);
    const auto b = small_codec().decode_stream(truncate_layers(stream, k));
    EXPECT_EQ(a.samples, b.samples);
  }
  EXPECT_THROW(small_codec().decode_stream(truncate_layers(stream, 1), 2), Error);
}

TEST(Codec, StreamingEqualsBatch) {
  for (std::size_t n : {160u, 8000u, 8001u, 12345u}) {
    const auto audio = testing::white_noise(n, 10 + n);
    const auto batch = small_codec().encode(audio, 3);
    EXPECT_EQ(encode_streaming(small_codec(), audio, 3), batch) << n;
    EXPECT_EQ(decode_streaming(small_codec(), batch).samples, small_codec().decode(batch).samples) << n;
  }
}

TEST(Codec, Deterministic) {
  const auto audio = testing::white_noise(4000, 4);
  EXPECT_EQ(small_codec().encode_to_stream(audio, 3), small_codec().encode_to_stream(audio, 3));
  const Codec other(testing::small_weights(), testing::small_config());
  EXPECT_EQ(other.encode_to_stream(audio, 3), small_codec().encode_to_stream(audio, 3));
}

TEST(Codec, EncoderCausalInSamples) {
  // Packet k sees input samples below k * 160 + 240.
  const auto audio = testing::white_noise(4800, 5);
  const auto base = small_codec().latents(audio);
  for (std::size_t pos : {0u, 239u, 240u, 2000u, 4799u}) {
    auto mutated = audio;
    mutated.samples[pos] += 0.5f;
    const auto z = small_codec().latents(mutated);
    const std::size_t first = pos < 240 ? 0 : (pos - 240) / 160 + 1;
    for (std::size_t k = 0; k < first; ++k) ASSERT_EQ(z.latents.column(k), base.latents.column(k)) << pos;
    EXPECT_NE(z.latents.column(first), base.latents.column(first)) << pos;
  }
}

TEST(Codec, RejectsBadInput) {
  AudioBuffer empty;
  EXPECT_THROW(small_codec().encode(empty, 3), Error);
  auto wrong_rate = testing::white_noise(320, 1);
  wrong_rate.sample_rate_hz = 44100;
  EXPECT_THROW(small_codec().encode(wrong_rate, 3), Error);
  EXPECT_THROW(small_codec().encode(testing::white_noise(320, 1), 4), Error);
}

TEST(Codec, RejectsMismatchedWeights) {
  EXPECT_THROW(Codec(testing::small_weights(), CodecConfig{}), Error);
}

TEST(Config, JsonOverridesAndDefaults) {
  const auto path = std::filesystem::temp_directory_path() / "nesc_codec_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"framing": {"lookahead_samples": 40}, "rvq": {"bits": 8}})";
  }
  const auto cfg = load_config(path);
  EXPECT_EQ(cfg.framing.lookahead_samples, 40u);
  EXPECT_EQ(cfg.framing.hop_samples, 160u);
  EXPECT_EQ(cfg.rvq.bits, 8u);
  EXPECT_EQ(cfg.encoder.residual_blocks, 4u);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(load_config(path), Error);
  std::filesystem::remove(path);
}

TEST(Config, SmallConfigJsonRoundTrip) {
  const nlohmann::json j = testing::small_config();
  const auto back = j.get<CodecConfig>();
  EXPECT_EQ(codec_manifest(back).parameter_count(), codec_manifest(testing::small_config()).parameter_count());
}

}  // namespace
}  // namespace nesc
