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

FrameMatrix random_frames(std::size_t f, std::uint64_t seed) {
  return {testing::random_tensor(320, f, seed, 0.5f), 160};
}

TEST(Encoder, OnePacketPerFrame) {
  const auto cfg = testing::small_config();
  const auto w = testing::small_weights();
  const auto z = encode(random_frames(200, 1), w, cfg.encoder);
  EXPECT_EQ(z.packets(), 200u);
  EXPECT_EQ(z.dim(), cfg.encoder.latent_dim);
  EXPECT_TRUE(z.latents.all_finite());
}

TEST(Encoder, DefaultConfigShape) {
  const EncoderConfig cfg;
  const auto w = random_weights(encoder_manifest(cfg), 7);
  const auto z = encode(random_frames(12, 2), w, cfg);
  EXPECT_EQ(z.packets(), 12u);
  EXPECT_EQ(z.dim(), 256u);
}

TEST(Encoder, ZeroFramesZeroWeightsGiveZeroLatents) {
  const auto cfg = testing::small_config().encoder;
  const auto z = encode(FrameMatrix{Tensor2D(320, 9), 160}, zero_weights(encoder_manifest(cfg)), cfg);
  for (float v : z.latents.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Encoder, PerturbingFrameLeavesEarlierLatentsUnchanged) {
  const auto cfg = testing::small_config().encoder;
  const auto w = random_weights(encoder_manifest(cfg), 7);
  const auto frames = random_frames(30, 3);
  const auto base = encode(frames, w, cfg);
  for (std::size_t k : {0u, 1u, 13u, 29u}) {
    auto mutated = frames;
    for (std::size_t i = 0; i < 320; ++i) mutated.data(i, k) += 0.25f;
    const auto z = encode(mutated, w, cfg);
    for (std::size_t t = 0; t < k; ++t) ASSERT_EQ(z.latents.column(t), base.latents.column(t)) << k;
    EXPECT_NE(z.latents.column(k), base.latents.column(k));
  }
}

TEST(Encoder, FrameByFrameEqualsBatch) {
  const auto cfg = testing::small_config().encoder;
  const auto weights = EncoderWeights::load(random_weights(encoder_manifest(cfg), 4), cfg);
  const auto frames = random_frames(50, 4);
  const auto batch = encode(frames, weights);
  StreamingEncoder enc(weights);
  for (std::size_t t = 0; t < 50; ++t)
    ASSERT_EQ(enc.push_frame(frames.data.column(t)), batch.latents.column(t)) << t;
}

TEST(Encoder, MissingTensorNamed) {
  const auto cfg = testing::small_config().encoder;
  auto full = random_weights(encoder_manifest(cfg), 1);
  TensorMap partial;
  for (const auto& t : full.entries())
    if (t.name != "enc.frontend.gru.weight_hh") partial.insert(t.name, t.shape, t.data);
  try {
    encode(random_frames(2, 1), partial, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("enc.frontend.gru.weight_hh"), std::string::npos);
  }
}

TEST(Encoder, RejectsWrongWindow) {
  const auto cfg = testing::small_config().encoder;
  const auto w = random_weights(encoder_manifest(cfg), 1);
  EXPECT_THROW(encode(FrameMatrix{Tensor2D(300, 4), 160}, w, cfg), Error);
}

TEST(EncoderParams, DefaultWithinTargetRange) {
  const auto n = count_encoder_params(EncoderConfig{});
  EXPECT_GE(n, 1'400'000u);
  EXPECT_LE(n, 2'700'000u);
}

TEST(EncoderParams, NoResidualBlocksIsFrontendOnly) {
  EncoderConfig cfg;
  cfg.residual_blocks = 0;
  const std::size_t conv_in = 512 * 320 + 512;
  const std::size_t gru = 3 * 128 * 512 + 3 * 128 * 128 + 2 * 3 * 128;
  const std::size_t conv_out = 256 * 128 + 256;
  EXPECT_EQ(count_encoder_params(cfg), conv_in + gru + conv_out);
}

TEST(EncoderParams, ResidualContributionQuadraticInChannels) {
  auto blocks_only = [](std::size_t ch) {
    EncoderConfig with, without;
    with.residual_ch = with.frontend_conv2_ch = with.latent_dim = ch;
    without = with;
    without.residual_blocks = 0;
    return static_cast<double>(count_encoder_params(with) - count_encoder_params(without));
  };
  const double ratio = blocks_only(512) / blocks_only(256);
  EXPECT_NEAR(ratio, 4.0, 0.02);
}

TEST(Encoder, Deterministic) {
  const auto cfg = testing::small_config().encoder;
  const auto w = random_weights(encoder_manifest(cfg), 2);
  const auto frames = random_frames(20, 5);
  EXPECT_EQ(encode(frames, w, cfg).latents, encode(frames, w, cfg).latents);
}

}  // namespace
}  // namespace nesc
