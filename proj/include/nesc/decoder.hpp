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

// Sub-band decoder. A causal GRU pre-net turns dequantized latents into
// conditioning features; the signal path starts from a learned constant prior
// and passes through upsampling stages, each of which
//
//   1. repeats signal and conditioning columns by the stage factor,
//   2. modulates the normalised signal: y = gamma(c) * norm(x) + beta(c),
//   3. emits tanh(conv_tanh(y)) * softmax_channels(conv_gate(y)).
//
// A final causal conv maps to four sub-bands, squashed by tanh.
// All convolutions are causal and the normalisation is per time step, so
// every output column depends only on the current and earlier packets.

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nesc/config.hpp"
#include "nesc/encoder.hpp"
#include "nesc/layers.hpp"
#include "nesc/manifest.hpp"
#include "nesc/nn.hpp"
#include "nesc/tensor_map.hpp"

namespace nesc {

struct DecoderWeights {
  struct Stage {
    int factor = 1;
    nn::ConvParams gamma;
    nn::ConvParams beta;
    nn::ConvParams tanh_branch;
    nn::ConvParams gate_branch;
  };

  DecoderConfig cfg;
  nn::GruParams prenet;
  std::vector<float> prior;
  std::vector<Stage> stages;
  nn::ConvParams out;

  static std::shared_ptr<const DecoderWeights> load(const TensorMap& map, const DecoderConfig& cfg,
                                                    std::size_t samples_per_packet = 160) {
    cfg.validate(samples_per_packet);
    auto w = std::make_shared<DecoderWeights>();
    w->cfg = cfg;
    w->prenet = load_gru(map, "dec.prenet.gru", cfg.latent_dim, cfg.prenet_hidden);
    w->prior = map.expect("dec.prior", {static_cast<std::uint32_t>(cfg.prior_ch)});
    for (std::size_t s = 0; s < cfg.block_channels.size(); ++s) {
      const std::size_t in = cfg.stage_input_channels(s);
      const std::size_t out = cfg.block_channels[s];
      Stage st;
      st.factor = cfg.upsample_factors[s];
      st.gamma = load_conv(map, names::dec_stage(s, "gamma"), in, cfg.conditioning_ch, 3);
      st.beta = load_conv(map, names::dec_stage(s, "beta"), in, cfg.conditioning_ch, 3);
      st.tanh_branch = load_conv(map, names::dec_stage(s, "tanh"), out, in, 3);
      st.gate_branch = load_conv(map, names::dec_stage(s, "gate"), out, in, 3);
      w->stages.push_back(std::move(st));
    }
    w->out = load_conv(map, "dec.out", cfg.out_subbands, cfg.output_input_channels(), 3);
    return w;
  }
};

/// Stateful decoder; chunked calls reproduce a single batch call bit-exactly.
class StreamingDecoder {
 public:
  explicit StreamingDecoder(std::shared_ptr<const DecoderWeights> weights)
      : weights_(std::move(weights)), prenet_(&weights_->prenet), out_(&weights_->out) {
    for (const auto& s : weights_->stages) {
      stages_.push_back({nn::CausalConv(&s.gamma), nn::CausalConv(&s.beta),
                         nn::CausalConv(&s.tanh_branch), nn::CausalConv(&s.gate_branch)});
    }
  }

  /// latents [latent_dim, n] -> sub-bands [4, n * total_upsampling]
  Tensor2D forward(const Tensor2D& latents) {
    const DecoderWeights& w = *weights_;
    Tensor2D cond = prenet_.forward(latents);
    Tensor2D x(w.cfg.prior_ch, latents.time());
    for (std::size_t c = 0; c < w.cfg.prior_ch; ++c)
      for (std::size_t t = 0; t < x.time(); ++t) x(c, t) = w.prior[c];

    for (std::size_t s = 0; s < stages_.size(); ++s) {
      const int factor = w.stages[s].factor;
      x = nn::upsample_repeat(x, factor);
      cond = nn::upsample_repeat(cond, factor);
      const Tensor2D gamma = stages_[s].gamma.forward(cond);
      const Tensor2D beta = stages_[s].beta.forward(cond);
      Tensor2D y = nn::step_norm(x);
      auto yd = y.data();
      auto gd = gamma.data();
      auto bd = beta.data();
      for (std::size_t i = 0; i < yd.size(); ++i) yd[i] = gd[i] * yd[i] + bd[i];
      x = nn::softmax_gated_tanh(stages_[s].tanh_branch.forward(y), stages_[s].gate_branch.forward(y));
    }
    Tensor2D bands = out_.forward(x);
    for (float& v : bands.data()) v = std::tanh(v);
    return bands;
  }

  Tensor2D push_packet(std::span<const float> latent) {
    return forward(Tensor2D(latent.size(), 1, std::vector<float>(latent.begin(), latent.end())));
  }

 private:
  struct StageState {
    nn::CausalConv gamma;
    nn::CausalConv beta;
    nn::CausalConv tanh_branch;
    nn::CausalConv gate_branch;
  };

  std::shared_ptr<const DecoderWeights> weights_;
  nn::Gru prenet_;
  std::vector<StageState> stages_;
  nn::CausalConv out_;
};

inline Tensor2D decode_subbands(const LatentSequence& latents,
                                std::shared_ptr<const DecoderWeights> weights) {
  StreamingDecoder dec(std::move(weights));
  return dec.forward(latents.latents);
}

inline Tensor2D decode_subbands(const LatentSequence& latents, const TensorMap& weights,
                                const DecoderConfig& cfg = {}) {
  return decode_subbands(latents, DecoderWeights::load(weights, cfg));
}

}  // namespace nesc
