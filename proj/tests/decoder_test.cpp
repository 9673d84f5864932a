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

#include "test_support.hpp"

namespace nesc {
namespace {

LatentSequence random_latents(std::size_t dim, std::size_t packets, std::uint64_t seed) {
  return {testing::random_tensor(dim, packets, seed)};
}

TEST(Decoder, FortySubbandSamplesPerPacket) {
  const auto cfg = testing::small_config().decoder;
  const auto w = random_weights(decoder_manifest(cfg), 3);
  const auto bands = decode_subbands(random_latents(16, 200, 1), w, cfg);
  EXPECT_EQ(bands.channels(), 4u);
  EXPECT_EQ(bands.time(), 8000u);
  EXPECT_TRUE(bands.all_finite());
}

TEST(Decoder, DefaultConfigShapeAndRange) {
  const DecoderConfig cfg;
  const auto w = random_weights(decoder_manifest(cfg), 7);
  const auto bands = decode_subbands(random_latents(256, 6, 2), w, cfg);
  EXPECT_EQ(bands.channels(), 4u);
  EXPECT_EQ(bands.time(), 240u);
  for (float v : bands.data()) {
    ASSERT_LE(v, 1.0f);
    ASSERT_GE(v, -1.0f);
  }
}

TEST(Decoder, ZeroWeightsGiveZeroSubbands) {
  const auto cfg = testing::small_config().decoder;
  const auto bands = decode_subbands(random_latents(16, 10, 3), zero_weights(decoder_manifest(cfg)), cfg);
  for (float v : bands.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Decoder, PerturbingPacketLeavesEarlierSamplesUnchanged) {
  const auto cfg = testing::small_config().decoder;
  const auto w = random_weights(decoder_manifest(cfg), 5);
  const auto z = random_latents(16, 25, 4);
  const auto base = decode_subbands(z, w, cfg);
  for (std::size_t k : {0u, 3u, 24u}) {
    auto mutated = z;
    for (std::size_t d = 0; d < 16; ++d) mutated.latents(d, k) += 0.5f;
    const auto out = decode_subbands(mutated, w, cfg);
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t t = 0; t < 40 * k; ++t) ASSERT_EQ(out(c, t), base(c, t)) << k;
    bool changed = false;
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t t = 40 * k; t < out.time(); ++t) changed |= out(c, t) != base(c, t);
    EXPECT_TRUE(changed);
  }
}

TEST(Decoder, PacketByPacketEqualsBatch) {
  const auto cfg = testing::small_config().decoder;
  const auto weights = DecoderWeights::load(random_weights(decoder_manifest(cfg), 6), cfg);
  const auto z = random_latents(16, 40, 5);
  const auto batch = decode_subbands(z, weights);
  StreamingDecoder dec(weights);
  Tensor2D streamed;
  for (std::size_t t = 0; t < 40; ++t) streamed.append_time(dec.push_packet(z.latents.column(t)));
  EXPECT_EQ(streamed, batch);
}

TEST(Decoder, MissingTensorNamed) {
  const auto cfg = testing::small_config().decoder;
  const auto full = random_weights(decoder_manifest(cfg), 1);
  TensorMap partial;
  for (const auto& t : full.entries())
    if (t.name != "dec.stage.2.gate.weight") partial.insert(t.name, t.shape, t.data);
  try {
    decode_subbands(random_latents(16, 2, 1), partial, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("dec.stage.2.gate.weight"), std::string::npos);
  }
}

TEST(DecoderConfig, UpsamplingMustMatchPacketLength) {
  DecoderConfig cfg;
  EXPECT_NO_THROW(cfg.validate(160));
  cfg.upsample_factors = {5, 2, 2, 3};
  EXPECT_THROW(cfg.validate(160), Error);
  cfg.upsample_factors = {5, 2, 2};
  EXPECT_THROW(cfg.validate(160), Error);
}

TEST(DecoderParams, DefaultWithinTargetRange) {
  const auto n = count_decoder_params(DecoderConfig{});
  EXPECT_GE(n, 2'500'000u);
  EXPECT_LE(n, 5'500'000u);
}

TEST(DecoderParams, ZeroStagesIsPrenetPriorAndOutput) {
  DecoderConfig cfg;
  cfg.upsample_factors.clear();
  cfg.block_channels.clear();
  const std::size_t prenet = 3 * 256 * 256 * 2 + 2 * 3 * 256;
  const std::size_t prior = 512;
  const std::size_t out = 4 * 512 * 3 + 4;
  EXPECT_EQ(count_decoder_params(cfg), prenet + prior + out);
}

TEST(DecoderParams, HalvingChannelsShrinksStagesAboutFourfold) {
  auto stage_params = [](std::size_t scale_num, std::size_t scale_den) {
    DecoderConfig cfg;
    cfg.prior_ch = cfg.prior_ch * scale_num / scale_den;
    cfg.prenet_hidden = cfg.conditioning_ch = cfg.conditioning_ch * scale_num / scale_den;
    for (auto& c : cfg.block_channels) c = c * scale_num / scale_den;
    DecoderConfig empty = cfg;
    empty.upsample_factors.clear();
    empty.block_channels.clear();
    // Output conv input width differs between the two; remove it explicitly.
    const std::size_t out_full = 4 * cfg.block_channels.back() * 3 + 4;
    const std::size_t out_empty = 4 * cfg.prior_ch * 3 + 4;
    return static_cast<double>(count_decoder_params(cfg) - out_full) -
           static_cast<double>(count_decoder_params(empty) - out_empty);
  };
  const double ratio = stage_params(1, 1) / stage_params(1, 2);
  EXPECT_NEAR(ratio, 4.0, 0.1);
}

TEST(Decoder, Deterministic) {
  const auto cfg = testing::small_config().decoder;
  const auto w = random_weights(decoder_manifest(cfg), 2);
  const auto z = random_latents(16, 12, 9);
  EXPECT_EQ(decode_subbands(z, w, cfg), decode_subbands(z, w, cfg));
}

}  // namespace
}  // namespace nesc
