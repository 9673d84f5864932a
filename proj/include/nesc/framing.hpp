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

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nesc/error.hpp"
#include "nesc/tensor.hpp"

namespace nesc {

inline constexpr int kSampleRateHz = 16000;

struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate_hz = kSampleRateHz;

  std::size_t size() const noexcept { return samples.size(); }
  double seconds() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

inline void validate_codec_input(const AudioBuffer& audio) {
  require(audio.sample_rate_hz == kSampleRateHz, ErrorKind::kInvalidArgument,
          "sample rate must be 16000 Hz, got " + std::to_string(audio.sample_rate_hz));
  for (float v : audio.samples)
    require(std::isfinite(v), ErrorKind::kInvalidArgument, "audio contains non-finite samples");
}

struct FramingConfig {
  std::size_t hop_samples = 160;
  std::size_t past_context_samples = 80;
  std::size_t lookahead_samples = 80;

  std::size_t window() const { return past_context_samples + hop_samples + lookahead_samples; }

  void validate() const {
    require(hop_samples > 0 && past_context_samples > 0 && lookahead_samples > 0,
            ErrorKind::kInvalidArgument, "hop, past context and lookahead must be positive");
  }
};

/// Window-by-frame matrix: one column of `window()` samples per hop.
struct FrameMatrix {
  Tensor2D data;  // [window, frames]
  std::size_t hop = 160;

  std::size_t window() const { return data.channels(); }
  std::size_t frames() const { return data.time(); }
};

inline std::size_t frame_count(std::size_t samples, std::size_t hop) {
  return (samples + hop - 1) / hop;
}

/// Column k holds samples [k*hop - past, k*hop + hop + lookahead); positions
/// outside the signal (including the zero-padded partial last hop) are zero.
inline FrameMatrix roll_window(const AudioBuffer& signal, const FramingConfig& cfg = {}) {
  cfg.validate();
  require(!signal.samples.empty(), ErrorKind::kInvalidArgument, "cannot frame an empty signal");
  validate_codec_input(signal);
  const std::size_t t = signal.samples.size();
  const std::size_t f = frame_count(t, cfg.hop_samples);
  const std::size_t s = cfg.window();
  FrameMatrix out{Tensor2D(s, f), cfg.hop_samples};
  for (std::size_t k = 0; k < f; ++k) {
    const auto start = static_cast<std::ptrdiff_t>(k * cfg.hop_samples) -
                       static_cast<std::ptrdiff_t>(cfg.past_context_samples);
    for (std::size_t i = 0; i < s; ++i) {
      const std::ptrdiff_t pos = start + static_cast<std::ptrdiff_t>(i);
      if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(t))
        out.data(i, k) = signal.samples[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

/// Streaming counterpart of roll_window. Each push delivers one hop; frame k
/// is emitted once its lookahead has arrived, i.e. after push k+1 when the
/// lookahead fits in one hop. `flush` emits the frames still owed, with a
/// zero lookahead, so that push+flush reproduces roll_window exactly.
class Framer {
 public:
  explicit Framer(FramingConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  std::optional<std::vector<float>> push(std::span<const float> chunk) {
    require(chunk.size() == cfg_.hop_samples, ErrorKind::kInvalidArgument,
            "framer expects chunks of " + std::to_string(cfg_.hop_samples) + " samples, got " +
                std::to_string(chunk.size()));
    buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
    received_ += chunk.size();
    ++hops_;
    if (next_frame_ >= hops_) return std::nullopt;
    const std::size_t needed = (next_frame_ + 1) * cfg_.hop_samples + cfg_.lookahead_samples;
    if (received_ < needed) return std::nullopt;
    return emit();
  }

  /// Remaining frames at end of stream, in order.
  std::vector<std::vector<float>> flush() {
    std::vector<std::vector<float>> out;
    while (next_frame_ < hops_) out.push_back(emit());
    return out;
  }

  const FramingConfig& config() const noexcept { return cfg_; }

 private:
  // buffer_[0] is absolute sample `base_`.
  float sample_at(std::ptrdiff_t pos) const {
    if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(received_)) return 0.0f;
    return buffer_[static_cast<std::size_t>(pos) - base_];
  }

  std::vector<float> emit() {
    const std::size_t s = cfg_.window();
    const auto start = static_cast<std::ptrdiff_t>(next_frame_ * cfg_.hop_samples) -
                       static_cast<std::ptrdiff_t>(cfg_.past_context_samples);
    std::vector<float> frame(s);
    for (std::size_t i = 0; i < s; ++i) frame[i] = sample_at(start + static_cast<std::ptrdiff_t>(i));
    ++next_frame_;
    // Drop samples no future frame can reach.
    const auto keep_from = static_cast<std::ptrdiff_t>(next_frame_ * cfg_.hop_samples) -
                           static_cast<std::ptrdiff_t>(cfg_.past_context_samples);
    if (keep_from > static_cast<std::ptrdiff_t>(base_)) {
      const std::size_t drop = static_cast<std::size_t>(keep_from) - base_;
      buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(drop));
      base_ += drop;
    }
    return frame;
  }

  FramingConfig cfg_;
  std::vector<float> buffer_;
  std::size_t base_ = 0;
  std::size_t received_ = 0;
  std::size_t hops_ = 0;
  std::size_t next_frame_ = 0;
};

}  // namespace nesc
