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

// End-to-end pipeline: framing -> encoder -> RVQ -> bitstream and
// bitstream -> RVQ decode -> sub-band decoder -> PQMF synthesis, in batch
// and in packet-by-packet streaming form.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nesc/bitstream.hpp"
#include "nesc/config.hpp"
#include "nesc/decoder.hpp"
#include "nesc/encoder.hpp"
#include "nesc/framing.hpp"
#include "nesc/pqmf.hpp"
#include "nesc/rvq.hpp"
#include "nesc/tensor_map.hpp"

namespace nesc {

struct DelayReport {
  double framing_lookahead_ms = 0.0;
  double frame_buffer_ms = 0.0;
  double decoder_ms = 0.0;
  double total_ms = 0.0;

  double encoder_side_ms() const { return framing_lookahead_ms + frame_buffer_ms; }
};

/// Encoder side: the framing lookahead plus one hop of buffering before a
/// frame can be emitted. Decoder side: the synthesis filter's lookahead,
/// rounded up to whole hops because output is produced a packet at a time.
inline DelayReport compute_delay_report(const FramingConfig& framing, std::size_t pqmf_taps,
                                        int sample_rate_hz = kSampleRateHz) {
  require(framing.hop_samples > 0 && sample_rate_hz > 0, ErrorKind::kInvalidArgument,
          "delay report needs a positive hop and sample rate");
  const double ms_per_sample = 1000.0 / sample_rate_hz;
  const std::size_t synthesis_lookahead = pqmf_taps / 2;
  const std::size_t decoder_hops = (synthesis_lookahead + framing.hop_samples - 1) / framing.hop_samples;
  DelayReport r;
  r.framing_lookahead_ms = static_cast<double>(framing.lookahead_samples) * ms_per_sample;
  r.frame_buffer_ms = static_cast<double>(framing.hop_samples) * ms_per_sample;
  r.decoder_ms = static_cast<double>(decoder_hops * framing.hop_samples) * ms_per_sample;
  r.total_ms = r.framing_lookahead_ms + r.frame_buffer_ms + r.decoder_ms;
  return r;
}

inline std::shared_ptr<const PqmfBank> pqmf_for_taps(std::size_t taps) {
  if (taps == default_pqmf().taps)
    return std::shared_ptr<const PqmfBank>(&default_pqmf(), [](const PqmfBank*) {});
  return std::make_shared<const PqmfBank>(design_pqmf(taps));
}

/// Immutable model bundle; safe to share between threads.
class Codec {
 public:
  Codec(const TensorMap& weights, CodecConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    encoder_ = EncoderWeights::load(weights, cfg_.encoder);
    rvq_ = std::make_shared<const RvqModel>(RvqModel::from_weights(weights, cfg_.rvq));
    decoder_ = DecoderWeights::load(weights, cfg_.decoder, cfg_.framing.hop_samples);
    pqmf_ = pqmf_for_taps(cfg_.pqmf_taps);
  }

  const CodecConfig& config() const noexcept { return cfg_; }
  const RvqModel& rvq() const noexcept { return *rvq_; }
  const PqmfBank& pqmf() const noexcept { return *pqmf_; }
  std::shared_ptr<const EncoderWeights> encoder_weights() const { return encoder_; }
  std::shared_ptr<const DecoderWeights> decoder_weights() const { return decoder_; }
  std::shared_ptr<const RvqModel> rvq_ptr() const { return rvq_; }
  std::shared_ptr<const PqmfBank> pqmf_ptr() const { return pqmf_; }

  LatentSequence latents(const AudioBuffer& audio) const {
    return nesc::encode(roll_window(audio, cfg_.framing), encoder_);
  }

  std::vector<PacketCodes> encode(const AudioBuffer& audio, std::size_t layers) const {
    return quantize_all(latents(audio), *rvq_, layers);
  }

  AudioBuffer decode(const std::vector<PacketCodes>& codes) const {
    const Tensor2D bands = decode_subbands(dequantize_all(codes, *rvq_), decoder_);
    return synthesize(bands, *pqmf_);
  }

  std::vector<std::uint8_t> encode_to_stream(const AudioBuffer& audio, std::size_t layers) const {
    return pack(encode(audio, layers), layers);
  }

  /// Decodes using the first `layers` indices of every packet (all when unset).
  AudioBuffer decode_stream(std::span<const std::uint8_t> stream,
                            std::optional<std::size_t> layers = std::nullopt) const {
    auto [header, codes] = unpack(stream);
    return decode(select_layers(header, std::move(codes), layers));
  }

  static std::vector<PacketCodes> select_layers(const BitstreamHeader& header,
                                                std::vector<PacketCodes> codes,
                                                std::optional<std::size_t> layers) {
    if (!layers) return codes;
    require(*layers >= 1 && *layers <= header.layers, ErrorKind::kInvalidLayers,
            "requested " + std::to_string(*layers) + " layers from a " +
                std::to_string(header.layers) + "-layer stream");
    for (auto& c : codes) c = c.prefix(*layers);
    return codes;
  }

 private:
  CodecConfig cfg_;
  std::shared_ptr<const EncoderWeights> encoder_;
  std::shared_ptr<const RvqModel> rvq_;
  std::shared_ptr<const DecoderWeights> decoder_;
  std::shared_ptr<const PqmfBank> pqmf_;
};

/// Hop-by-hop encoder: push one hop of samples, receive a packet once the
/// frame's lookahead has arrived.
class EncoderSession {
 public:
  EncoderSession(const Codec& codec, std::size_t layers)
      : framer_(codec.config().framing),
        encoder_(codec.encoder_weights()),
        rvq_(codec.rvq_ptr()),
        layers_(layers) {
    require(layers >= 1 && layers <= rvq_->stages(), ErrorKind::kInvalidLayers,
            "layers must be in [1, " + std::to_string(rvq_->stages()) + "]");
  }

  std::optional<PacketCodes> push(std::span<const float> hop) {
    for (float v : hop)
      require(std::isfinite(v), ErrorKind::kInvalidArgument, "audio contains non-finite samples");
    auto frame = framer_.push(hop);
    if (!frame) return std::nullopt;
    return quantize(encoder_.push_frame(*frame), *rvq_, layers_);
  }

  std::vector<PacketCodes> flush() {
    std::vector<PacketCodes> out;
    for (const auto& frame : framer_.flush())
      out.push_back(quantize(encoder_.push_frame(frame), *rvq_, layers_));
    return out;
  }

 private:
  Framer framer_;
  StreamingEncoder encoder_;
  std::shared_ptr<const RvqModel> rvq_;
  std::size_t layers_;
};

/// Packet-by-packet decoder: each packet yields one hop of output samples.
class DecoderSession {
 public:
  explicit DecoderSession(const Codec& codec)
      : decoder_(codec.decoder_weights()), rvq_(codec.rvq_ptr()), pqmf_(codec.pqmf_ptr()),
        synth_(*pqmf_) {}

  std::vector<float> push(const PacketCodes& codes) {
    return synth_.push(decoder_.push_packet(dequantize(codes, *rvq_)));
  }

 private:
  StreamingDecoder decoder_;
  std::shared_ptr<const RvqModel> rvq_;
  std::shared_ptr<const PqmfBank> pqmf_;
  PqmfSynthesizer synth_;
};

/// Feeds `audio` through an EncoderSession one hop at a time; a partial last
/// hop is zero-padded.
inline std::vector<PacketCodes> encode_streaming(const Codec& codec, const AudioBuffer& audio,
                                                 std::size_t layers) {
  require(!audio.samples.empty(), ErrorKind::kInvalidArgument, "cannot encode an empty signal");
  validate_codec_input(audio);
  const std::size_t hop = codec.config().framing.hop_samples;
  EncoderSession session(codec, layers);
  std::vector<PacketCodes> out;
  std::vector<float> chunk(hop);
  for (std::size_t start = 0; start < audio.samples.size(); start += hop) {
    std::fill(chunk.begin(), chunk.end(), 0.0f);
    const std::size_t n = std::min(hop, audio.samples.size() - start);
    std::copy_n(audio.samples.begin() + static_cast<std::ptrdiff_t>(start), n, chunk.begin());
    if (auto p = session.push(chunk)) out.push_back(std::move(*p));
  }
  for (auto& p : session.flush()) out.push_back(std::move(p));
  return out;
}

inline AudioBuffer decode_streaming(const Codec& codec, const std::vector<PacketCodes>& codes) {
  DecoderSession session(codec);
  AudioBuffer out;
  for (const auto& c : codes) {
    auto hop = session.push(c);
    out.samples.insert(out.samples.end(), hop.begin(), hop.end());
  }
  return out;
}

}  // namespace nesc
