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

// Frame-rate encoder: window samples are treated as channels and frames as
// time, so 1x1 convolutions mix samples within a frame and the GRU carries
// context across frames.
//
//   conv1x1(window -> conv1) + LReLU
//   GRU(conv1 -> gru_hidden) + LReLU
//   conv1x1(gru_hidden -> conv2) + LReLU
//   residual blocks: x + conv1x1(LReLU(causal_conv3(LReLU(x))))

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nesc/config.hpp"
#include "nesc/framing.hpp"
#include "nesc/layers.hpp"
#include "nesc/manifest.hpp"
#include "nesc/nn.hpp"
#include "nesc/tensor_map.hpp"

namespace nesc {

/// One 256-dim (latent_dim) column per 10 ms packet.
struct LatentSequence {
  Tensor2D latents;  // [latent_dim, packets]

  std::size_t dim() const { return latents.channels(); }
  std::size_t packets() const { return latents.time(); }
};

struct EncoderWeights {
  struct ResidualBlock {
    nn::ConvParams conv3;
    nn::ConvParams conv1;
  };

  EncoderConfig cfg;
  nn::ConvParams conv_in;
  nn::GruParams gru;
  nn::ConvParams conv_out;
  std::vector<ResidualBlock> blocks;

  static std::shared_ptr<const EncoderWeights> load(const TensorMap& map,
                                                    const EncoderConfig& cfg) {
    cfg.validate();
    auto w = std::make_shared<EncoderWeights>();
    w->cfg = cfg;
    w->conv_in = load_conv(map, "enc.frontend.conv_in", cfg.frontend_conv1_ch, cfg.frame_samples, 1);
    w->gru = load_gru(map, "enc.frontend.gru", cfg.frontend_conv1_ch, cfg.frontend_gru_hidden);
    w->conv_out =
        load_conv(map, "enc.frontend.conv_out", cfg.frontend_conv2_ch, cfg.frontend_gru_hidden, 1);
    for (std::size_t b = 0; b < cfg.residual_blocks; ++b) {
      w->blocks.push_back({load_conv(map, names::enc_res(b, "conv3"), cfg.residual_ch,
                                     cfg.residual_ch, 3),
                           load_conv(map, names::enc_res(b, "conv1"), cfg.residual_ch,
                                     cfg.residual_ch, 1)});
    }
    return w;
  }
};

/// Stateful encoder. Any split of the frame sequence into chunks gives the
/// same latents as a single call over all frames.
class StreamingEncoder {
 public:
  explicit StreamingEncoder(std::shared_ptr<const EncoderWeights> weights)
      : weights_(std::move(weights)),
        conv_in_(&weights_->conv_in),
        gru_(&weights_->gru),
        conv_out_(&weights_->conv_out) {
    for (const auto& b : weights_->blocks) {
      block_conv3_.emplace_back(&b.conv3);
      block_conv1_.emplace_back(&b.conv1);
    }
  }

  /// frames: [frame_samples, n] -> latents [latent_dim, n]
  Tensor2D forward(const Tensor2D& frames) {
    require(frames.channels() == weights_->cfg.frame_samples, ErrorKind::kShapeMismatch,
            "encoder expects frames of " + std::to_string(weights_->cfg.frame_samples) +
                " samples");
    Tensor2D h = conv_in_.forward(frames);
    nn::leaky_relu_inplace(h);
    h = gru_.forward(h);
    nn::leaky_relu_inplace(h);
    h = conv_out_.forward(h);
    nn::leaky_relu_inplace(h);
    for (std::size_t b = 0; b < block_conv3_.size(); ++b) {
      Tensor2D a = nn::leaky_relu(h);
      a = block_conv3_[b].forward(a);
      nn::leaky_relu_inplace(a);
      a = block_conv1_[b].forward(a);
      add_inplace(h, a);
    }
    return h;
  }

  std::vector<float> push_frame(std::span<const float> frame) {
    Tensor2D x(frame.size(), 1, std::vector<float>(frame.begin(), frame.end()));
    return forward(x).column(0);
  }

 private:
  std::shared_ptr<const EncoderWeights> weights_;
  nn::CausalConv conv_in_;
  nn::Gru gru_;
  nn::CausalConv conv_out_;
  std::vector<nn::CausalConv> block_conv3_;
  std::vector<nn::CausalConv> block_conv1_;
};

inline LatentSequence encode(const FrameMatrix& frames, std::shared_ptr<const EncoderWeights> weights) {
  StreamingEncoder enc(std::move(weights));
  return {enc.forward(frames.data)};
}

inline LatentSequence encode(const FrameMatrix& frames, const TensorMap& weights,
                             const EncoderConfig& cfg = {}) {
  return encode(frames, EncoderWeights::load(weights, cfg));
}

}  // namespace nesc
