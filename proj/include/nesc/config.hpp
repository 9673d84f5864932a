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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "nesc/error.hpp"
#include "nesc/framing.hpp"

namespace nesc {

struct EncoderConfig {
  std::size_t frame_samples = 320;
  std::size_t frontend_conv1_ch = 512;
  std::size_t frontend_gru_hidden = 128;
  std::size_t frontend_conv2_ch = 256;
  std::size_t residual_blocks = 4;
  std::size_t residual_ch = 256;
  std::size_t latent_dim = 256;

  void validate() const {
    require(frame_samples > 0 && frontend_conv1_ch > 0 && frontend_gru_hidden > 0 &&
                frontend_conv2_ch > 0 && residual_ch > 0 && latent_dim > 0,
            ErrorKind::kInvalidArgument, "encoder dimensions must be positive");
    require(latent_dim == residual_ch && frontend_conv2_ch == residual_ch,
            ErrorKind::kInvalidArgument,
            "encoder requires frontend_conv2_ch == residual_ch == latent_dim");
  }
};

struct DecoderConfig {
  std::size_t latent_dim = 256;
  std::size_t prenet_hidden = 256;
  std::size_t conditioning_ch = 256;
  std::size_t prior_ch = 512;
  std::vector<int> upsample_factors = {5, 2, 2, 2};
  std::vector<std::size_t> block_channels = {512, 256, 128, 64};
  std::size_t out_subbands = 4;

  std::size_t total_upsampling() const {
    return std::accumulate(upsample_factors.begin(), upsample_factors.end(), std::size_t{1},
                           [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  }

  std::size_t stage_input_channels(std::size_t stage) const {
    return stage == 0 ? prior_ch : block_channels[stage - 1];
  }

  std::size_t output_input_channels() const {
    return block_channels.empty() ? prior_ch : block_channels.back();
  }

  /// Structural checks. `samples_per_packet` ties the upsampling chain to the
  /// sub-band rate: product(factors) * out_subbands must equal it.
  void validate(std::size_t samples_per_packet) const {
    require(upsample_factors.size() == block_channels.size(), ErrorKind::kInvalidArgument,
            "upsample_factors and block_channels must have equal length");
    for (int f : upsample_factors)
      require(f >= 1, ErrorKind::kInvalidArgument, "upsample factors must be >= 1");
    require(out_subbands == 4, ErrorKind::kInvalidArgument, "decoder must emit 4 sub-bands");
    require(conditioning_ch == prenet_hidden, ErrorKind::kInvalidArgument,
            "conditioning channels come from the pre-net, so they must equal prenet_hidden");
    require(total_upsampling() * out_subbands == samples_per_packet, ErrorKind::kInvalidArgument,
            "upsampling product " + std::to_string(total_upsampling()) + " x " +
                std::to_string(out_subbands) + " bands must equal the packet length " +
                std::to_string(samples_per_packet));
  }
};

struct RvqConfig {
  std::size_t stages = 3;
  std::size_t bits = 10;
  std::size_t dim = 256;

  std::size_t codebook_size() const { return std::size_t{1} << bits; }

  void validate() const {
    require(stages >= 1 && stages <= 3, ErrorKind::kInvalidArgument, "RVQ needs 1..3 stages");
    require(bits >= 1 && bits <= 10, ErrorKind::kInvalidArgument,
            "codebook indices must fit the 10-bit wire field");
    require(dim > 0, ErrorKind::kInvalidArgument, "RVQ dimension must be positive");
  }
};

/// Everything needed to build the pipeline and its weights manifest.
struct CodecConfig {
  FramingConfig framing;
  EncoderConfig encoder;
  DecoderConfig decoder;
  RvqConfig rvq;
  std::size_t pqmf_taps = 100;

  void validate() const {
    framing.validate();
    encoder.validate();
    rvq.validate();
    decoder.validate(framing.hop_samples);
    require(encoder.frame_samples == framing.window(), ErrorKind::kInvalidArgument,
            "encoder frame_samples must equal the framing window");
    require(rvq.dim == encoder.latent_dim && decoder.latent_dim == encoder.latent_dim,
            ErrorKind::kInvalidArgument, "latent dimension must agree across modules");
    require(pqmf_taps >= 16, ErrorKind::kInvalidArgument, "PQMF needs at least 16 taps");
  }
};

// JSON keys mirror the field names; any key may be omitted to keep its default.
inline void from_json(const nlohmann::json& j, FramingConfig& c) {
  c.hop_samples = j.value("hop_samples", c.hop_samples);
  c.past_context_samples = j.value("past_context_samples", c.past_context_samples);
  c.lookahead_samples = j.value("lookahead_samples", c.lookahead_samples);
}
inline void to_json(nlohmann::json& j, const FramingConfig& c) {
  j = {{"hop_samples", c.hop_samples},
       {"past_context_samples", c.past_context_samples},
       {"lookahead_samples", c.lookahead_samples}};
}

inline void from_json(const nlohmann::json& j, EncoderConfig& c) {
  c.frame_samples = j.value("frame_samples", c.frame_samples);
  c.frontend_conv1_ch = j.value("frontend_conv1_ch", c.frontend_conv1_ch);
  c.frontend_gru_hidden = j.value("frontend_gru_hidden", c.frontend_gru_hidden);
  c.frontend_conv2_ch = j.value("frontend_conv2_ch", c.frontend_conv2_ch);
  c.residual_blocks = j.value("residual_blocks", c.residual_blocks);
  c.residual_ch = j.value("residual_ch", c.residual_ch);
  c.latent_dim = j.value("latent_dim", c.latent_dim);
}
inline void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = {{"frame_samples", c.frame_samples},     {"frontend_conv1_ch", c.frontend_conv1_ch},
       {"frontend_gru_hidden", c.frontend_gru_hidden},
       {"frontend_conv2_ch", c.frontend_conv2_ch}, {"residual_blocks", c.residual_blocks},
       {"residual_ch", c.residual_ch},         {"latent_dim", c.latent_dim}};
}

inline void from_json(const nlohmann::json& j, DecoderConfig& c) {
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  c.prenet_hidden = j.value("prenet_hidden", c.prenet_hidden);
  c.conditioning_ch = j.value("conditioning_ch", c.conditioning_ch);
  c.prior_ch = j.value("prior_ch", c.prior_ch);
  c.upsample_factors = j.value("upsample_factors", c.upsample_factors);
  c.block_channels = j.value("block_channels", c.block_channels);
  c.out_subbands = j.value("out_subbands", c.out_subbands);
}
inline void to_json(nlohmann::json& j, const DecoderConfig& c) {
  j = {{"latent_dim", c.latent_dim},       {"prenet_hidden", c.prenet_hidden},
       {"conditioning_ch", c.conditioning_ch}, {"prior_ch", c.prior_ch},
       {"upsample_factors", c.upsample_factors}, {"block_channels", c.block_channels},
       {"out_subbands", c.out_subbands}};
}

inline void from_json(const nlohmann::json& j, RvqConfig& c) {
  c.stages = j.value("stages", c.stages);
  c.bits = j.value("bits", c.bits);
  c.dim = j.value("dim", c.dim);
}
inline void to_json(nlohmann::json& j, const RvqConfig& c) {
  j = {{"stages", c.stages}, {"bits", c.bits}, {"dim", c.dim}};
}

inline void from_json(const nlohmann::json& j, CodecConfig& c) {
  if (j.contains("framing")) c.framing = j.at("framing").get<FramingConfig>();
  if (j.contains("encoder")) c.encoder = j.at("encoder").get<EncoderConfig>();
  if (j.contains("decoder")) c.decoder = j.at("decoder").get<DecoderConfig>();
  if (j.contains("rvq")) c.rvq = j.at("rvq").get<RvqConfig>();
  c.pqmf_taps = j.value("pqmf_taps", c.pqmf_taps);
}
inline void to_json(nlohmann::json& j, const CodecConfig& c) {
  j = {{"framing", c.framing}, {"encoder", c.encoder}, {"decoder", c.decoder},
       {"rvq", c.rvq},         {"pqmf_taps", c.pqmf_taps}};
}

inline CodecConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open config '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in).get<CodecConfig>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInvalidArgument, "config '" + path.string() + "': " + e.what());
  }
}

}  // namespace nesc
