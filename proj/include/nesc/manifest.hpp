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

// Tensor names and shapes for every parameterised layer. Conv weights are
// [out, in, kernel]; GRU weights follow nn::GruParams.

#include <cstddef>
#include <string>

#include "nesc/config.hpp"
#include "nesc/tensor_map.hpp"

namespace nesc {

namespace names {

inline std::string enc_res(std::size_t block, const char* leaf) {
  return "enc.res." + std::to_string(block) + "." + leaf;
}
inline std::string dec_stage(std::size_t stage, const char* leaf) {
  return "dec.stage." + std::to_string(stage) + "." + leaf;
}
inline std::string codebook(std::size_t stage) { return "rvq.codebook." + std::to_string(stage); }

}  // namespace names

namespace detail {

inline void add_conv(Manifest& m, const std::string& prefix, std::size_t out, std::size_t in,
                     std::size_t kernel) {
  const auto u = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
  m.tensors.push_back({prefix + ".weight", {u(out), u(in), u(kernel)}});
  m.tensors.push_back({prefix + ".bias", {u(out)}});
}

inline void add_gru(Manifest& m, const std::string& prefix, std::size_t in, std::size_t hidden) {
  const auto u = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
  m.tensors.push_back({prefix + ".weight_ih", {u(3 * hidden), u(in)}});
  m.tensors.push_back({prefix + ".weight_hh", {u(3 * hidden), u(hidden)}});
  m.tensors.push_back({prefix + ".bias_ih", {u(3 * hidden)}});
  m.tensors.push_back({prefix + ".bias_hh", {u(3 * hidden)}});
}

}  // namespace detail

inline Manifest encoder_manifest(const EncoderConfig& cfg) {
  Manifest m;
  detail::add_conv(m, "enc.frontend.conv_in", cfg.frontend_conv1_ch, cfg.frame_samples, 1);
  detail::add_gru(m, "enc.frontend.gru", cfg.frontend_conv1_ch, cfg.frontend_gru_hidden);
  detail::add_conv(m, "enc.frontend.conv_out", cfg.frontend_conv2_ch, cfg.frontend_gru_hidden, 1);
  for (std::size_t b = 0; b < cfg.residual_blocks; ++b) {
    detail::add_conv(m, names::enc_res(b, "conv3"), cfg.residual_ch, cfg.residual_ch, 3);
    detail::add_conv(m, names::enc_res(b, "conv1"), cfg.residual_ch, cfg.residual_ch, 1);
  }
  return m;
}

inline Manifest decoder_manifest(const DecoderConfig& cfg) {
  Manifest m;
  detail::add_gru(m, "dec.prenet.gru", cfg.latent_dim, cfg.prenet_hidden);
  m.tensors.push_back({"dec.prior", {static_cast<std::uint32_t>(cfg.prior_ch)}});
  for (std::size_t s = 0; s < cfg.block_channels.size(); ++s) {
    const std::size_t in = cfg.stage_input_channels(s);
    const std::size_t out = cfg.block_channels[s];
    detail::add_conv(m, names::dec_stage(s, "gamma"), in, cfg.conditioning_ch, 3);
    detail::add_conv(m, names::dec_stage(s, "beta"), in, cfg.conditioning_ch, 3);
    detail::add_conv(m, names::dec_stage(s, "tanh"), out, in, 3);
    detail::add_conv(m, names::dec_stage(s, "gate"), out, in, 3);
  }
  detail::add_conv(m, "dec.out", cfg.out_subbands, cfg.output_input_channels(), 3);
  return m;
}

inline Manifest rvq_manifest(const RvqConfig& cfg) {
  Manifest m;
  for (std::size_t s = 0; s < cfg.stages; ++s)
    m.tensors.push_back({names::codebook(s), {static_cast<std::uint32_t>(cfg.codebook_size()),
                                              static_cast<std::uint32_t>(cfg.dim)}});
  return m;
}

/// Encoder, codebooks and decoder in one flat container.
inline Manifest codec_manifest(const CodecConfig& cfg) {
  Manifest m = encoder_manifest(cfg.encoder);
  m.append(rvq_manifest(cfg.rvq));
  m.append(decoder_manifest(cfg.decoder));
  return m;
}

inline std::size_t count_encoder_params(const EncoderConfig& cfg) {
  return encoder_manifest(cfg).parameter_count();
}

inline std::size_t count_decoder_params(const DecoderConfig& cfg) {
  return decoder_manifest(cfg).parameter_count();
}

}  // namespace nesc
