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

// Forward-only inference kernels shared by the encoder and the decoder.
//
// Every kernel accumulates each output element in a fixed order that does not
// depend on how the time axis is chunked, so streaming (chunked) and batch
// evaluation are bit-identical. Build with -ffp-contract=off to keep it so.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nesc/error.hpp"
#include "nesc/tensor.hpp"

namespace nesc::nn {

inline constexpr float kLeakySlope = 0.2f;

enum class Padding { kCausal, kCentered };

/// Weight layout [out_ch, in_ch, kernel], bias [out_ch].
struct ConvParams {
  std::size_t out_ch = 0;
  std::size_t in_ch = 0;
  std::size_t kernel = 1;
  Padding padding = Padding::kCausal;
  std::vector<float> weight;
  std::vector<float> bias;

  float w(std::size_t o, std::size_t i, std::size_t k) const {
    return weight[(o * in_ch + i) * kernel + k];
  }

  std::size_t parameter_count() const { return out_ch * in_ch * kernel + out_ch; }

  void validate() const {
    require(kernel % 2 == 1, ErrorKind::kInvalidArgument, "conv kernel must be odd");
    require(weight.size() == out_ch * in_ch * kernel, ErrorKind::kShapeMismatch,
            "conv weight size does not match [out, in, kernel]");
    require(bias.size() == out_ch, ErrorKind::kShapeMismatch, "conv bias size mismatch");
  }
};

/// Gate rows are ordered reset, update, new: weight_ih [3H, in],
/// weight_hh [3H, H], biases [3H].
struct GruParams {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::vector<float> weight_ih;
  std::vector<float> weight_hh;
  std::vector<float> bias_ih;
  std::vector<float> bias_hh;

  std::size_t parameter_count() const {
    return 3 * hidden * input + 3 * hidden * hidden + 6 * hidden;
  }

  void validate() const {
    require(weight_ih.size() == 3 * hidden * input, ErrorKind::kShapeMismatch,
            "GRU weight_ih size mismatch");
    require(weight_hh.size() == 3 * hidden * hidden, ErrorKind::kShapeMismatch,
            "GRU weight_hh size mismatch");
    require(bias_ih.size() == 3 * hidden && bias_hh.size() == 3 * hidden,
            ErrorKind::kShapeMismatch, "GRU bias size mismatch");
  }
};

namespace detail {

// y[o][t] = bias[o] + sum_i sum_k w[o][i][k] * xp[i][t + k]
// `xp` rows hold `out_time + kernel - 1` valid columns with the given stride.
inline void conv_accumulate(const ConvParams& p, const float* xp, std::size_t stride,
                            std::size_t out_time, Tensor2D& y) {
  constexpr std::size_t kOB = 4;
  constexpr std::size_t kTB = 16;
  constexpr std::size_t kTile = 128;  // time columns kept hot in cache
  const std::size_t O = p.out_ch;
  const std::size_t I = p.in_ch;
  const std::size_t K = p.kernel;
  for (std::size_t tile = 0; tile < out_time; tile += kTile) {
  const std::size_t tile_end = std::min(out_time, tile + kTile);
  for (std::size_t o0 = 0; o0 < O; o0 += kOB) {
    const std::size_t ob = std::min(kOB, O - o0);
    for (std::size_t t0 = tile; t0 < tile_end; t0 += kTB) {
      const std::size_t tb = std::min(kTB, tile_end - t0);
      float acc[kOB][kTB];
      for (std::size_t q = 0; q < ob; ++q)
        for (std::size_t tt = 0; tt < kTB; ++tt) acc[q][tt] = p.bias[o0 + q];
      if (ob == kOB && tb == kTB) {
        for (std::size_t i = 0; i < I; ++i) {
          for (std::size_t k = 0; k < K; ++k) {
            const float* xr = xp + i * stride + t0 + k;
            const float w0 = p.w(o0 + 0, i, k);
            const float w1 = p.w(o0 + 1, i, k);
            const float w2 = p.w(o0 + 2, i, k);
            const float w3 = p.w(o0 + 3, i, k);
            for (std::size_t tt = 0; tt < kTB; ++tt) {
              const float xv = xr[tt];
              acc[0][tt] += w0 * xv;
              acc[1][tt] += w1 * xv;
              acc[2][tt] += w2 * xv;
              acc[3][tt] += w3 * xv;
            }
          }
        }
      } else {
        for (std::size_t i = 0; i < I; ++i) {
          for (std::size_t k = 0; k < K; ++k) {
            const float* xr = xp + i * stride + t0 + k;
            for (std::size_t q = 0; q < ob; ++q) {
              const float wv = p.w(o0 + q, i, k);
              for (std::size_t tt = 0; tt < tb; ++tt) acc[q][tt] += wv * xr[tt];
            }
          }
        }
      }
      for (std::size_t q = 0; q < ob; ++q)
        for (std::size_t tt = 0; tt < tb; ++tt) y(o0 + q, t0 + tt) = acc[q][tt];
    }
  }
  }
}

inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace detail

/// Causal convolution with carried left context. A fresh instance starts from
/// zero history, so one call over a whole sequence equals the batch result.
class CausalConv {
 public:
  CausalConv() = default;
  explicit CausalConv(const ConvParams* params)
      : params_(params), history_(params->in_ch, params->kernel - 1) {}

  Tensor2D forward(const Tensor2D& x) {
    const ConvParams& p = *params_;
    require(x.channels() == p.in_ch, ErrorKind::kShapeMismatch,
            "conv expects " + std::to_string(p.in_ch) + " input channels, got " +
                std::to_string(x.channels()));
    const std::size_t ctx = p.kernel - 1;
    const std::size_t T = x.time();
    const std::size_t stride = ctx + T;
    std::vector<float> padded(p.in_ch * stride);
    for (std::size_t i = 0; i < p.in_ch; ++i) {
      float* dst = padded.data() + i * stride;
      auto h = history_.row(i);
      std::copy(h.begin(), h.end(), dst);
      auto r = x.row(i);
      std::copy(r.begin(), r.end(), dst + ctx);
    }
    Tensor2D y(p.out_ch, T);
    if (T > 0) detail::conv_accumulate(p, padded.data(), stride, T, y);
    for (std::size_t i = 0; i < p.in_ch; ++i)
      for (std::size_t k = 0; k < ctx; ++k) history_(i, k) = padded[i * stride + T + k];
    return y;
  }

  void reset() { history_ = Tensor2D(history_.channels(), history_.time()); }

 private:
  const ConvParams* params_ = nullptr;
  Tensor2D history_;
};

/// Same-length 1-D convolution. Kernel 1 is a per-step linear map; causal
/// padding looks only backward, centered padding pads (K-1)/2 on each side.
inline Tensor2D conv1d(const Tensor2D& x, const ConvParams& p) {
  p.validate();
  if (p.kernel == 1 || p.padding == Padding::kCausal) {
    CausalConv conv(&p);
    return conv.forward(x);
  }
  require(x.channels() == p.in_ch, ErrorKind::kShapeMismatch, "conv input channel mismatch");
  const std::size_t half = (p.kernel - 1) / 2;
  const std::size_t T = x.time();
  const std::size_t stride = T + 2 * half;
  std::vector<float> padded(p.in_ch * stride, 0.0f);
  for (std::size_t i = 0; i < p.in_ch; ++i) {
    auto r = x.row(i);
    std::copy(r.begin(), r.end(), padded.data() + i * stride + half);
  }
  Tensor2D y(p.out_ch, T);
  if (T > 0) detail::conv_accumulate(p, padded.data(), stride, T, y);
  return y;
}

/// Stateful GRU; `forward` may be called with any number of steps per chunk.
class Gru {
 public:
  Gru() = default;
  explicit Gru(const GruParams* params)
      : params_(params), state_(params->hidden, 0.0f) {
    input_proj_.out_ch = 3 * params->hidden;
    input_proj_.in_ch = params->input;
    input_proj_.kernel = 1;
    input_proj_.weight = params->weight_ih;
    input_proj_.bias = params->bias_ih;
  }

  void set_state(std::span<const float> h) {
    require(h.size() == params_->hidden, ErrorKind::kShapeMismatch, "GRU state size mismatch");
    state_.assign(h.begin(), h.end());
  }
  const std::vector<float>& state() const noexcept { return state_; }

  Tensor2D forward(const Tensor2D& x) {
    const GruParams& p = *params_;
    require(x.channels() == p.input, ErrorKind::kShapeMismatch,
            "GRU expects " + std::to_string(p.input) + " input channels, got " +
                std::to_string(x.channels()));
    const std::size_t H = p.hidden;
    const std::size_t T = x.time();
    Tensor2D gi(3 * H, T);
    if (T > 0) detail::conv_accumulate(input_proj_, x.data().data(), T, T, gi);
    Tensor2D out(H, T);
    std::vector<float> gh(3 * H);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t r = 0; r < 3 * H; ++r) {
        float acc = p.bias_hh[r];
        const float* wr = p.weight_hh.data() + r * H;
        for (std::size_t k = 0; k < H; ++k) acc += wr[k] * state_[k];
        gh[r] = acc;
      }
      for (std::size_t j = 0; j < H; ++j) {
        const float reset = detail::sigmoid(gi(j, t) + gh[j]);
        const float update = detail::sigmoid(gi(H + j, t) + gh[H + j]);
        const float cand = std::tanh(gi(2 * H + j, t) + reset * gh[2 * H + j]);
        out(j, t) = (1.0f - update) * cand + update * state_[j];
      }
      for (std::size_t j = 0; j < H; ++j) state_[j] = out(j, t);
    }
    return out;
  }

  void reset() { std::fill(state_.begin(), state_.end(), 0.0f); }

 private:
  const GruParams* params_ = nullptr;
  ConvParams input_proj_;
  std::vector<float> state_;
};

/// Runs the GRU over every time step of `x` from initial state `h0`.
/// Returns the [hidden, time] outputs and the final state.
inline std::pair<Tensor2D, std::vector<float>> gru_forward(const Tensor2D& x,
                                                           const GruParams& p,
                                                           std::span<const float> h0) {
  p.validate();
  Gru gru(&p);
  gru.set_state(h0);
  Tensor2D out = gru.forward(x);
  return {std::move(out), gru.state()};
}

inline void leaky_relu_inplace(Tensor2D& x, float slope = kLeakySlope) {
  for (float& v : x.data()) v = std::max(v, slope * v);
}

inline Tensor2D leaky_relu(Tensor2D x, float slope = kLeakySlope) {
  leaky_relu_inplace(x, slope);
  return x;
}

/// tanh(a) multiplied by softmax(b) taken over channels at each time step.
inline Tensor2D softmax_gated_tanh(const Tensor2D& a, const Tensor2D& b) {
  require(a.channels() == b.channels() && a.time() == b.time(), ErrorKind::kShapeMismatch,
          "softmax_gated_tanh operands differ in shape");
  const std::size_t C = a.channels();
  const std::size_t T = a.time();
  Tensor2D out(C, T);
  std::vector<float> peak(T, -INFINITY);
  std::vector<float> denom(T, 0.0f);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t) peak[t] = std::max(peak[t], b(c, t));
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) {
      const float e = std::exp(b(c, t) - peak[t]);
      out(c, t) = e;
      denom[t] += e;
    }
  }
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t) out(c, t) = std::tanh(a(c, t)) * (out(c, t) / denom[t]);
  return out;
}

/// Nearest-neighbour upsampling: every column repeated `factor` times.
inline Tensor2D upsample_repeat(const Tensor2D& x, int factor) {
  require(factor >= 1, ErrorKind::kInvalidArgument, "upsample factor must be >= 1");
  const auto f = static_cast<std::size_t>(factor);
  Tensor2D out(x.channels(), x.time() * f);
  for (std::size_t c = 0; c < x.channels(); ++c)
    for (std::size_t t = 0; t < x.time(); ++t)
      for (std::size_t r = 0; r < f; ++r) out(c, t * f + r) = x(c, t);
  return out;
}

/// Per-channel standardisation over the time axis (population variance).
inline Tensor2D channel_norm(const Tensor2D& x, float eps = 1e-5f) {
  require(x.time() >= 1, ErrorKind::kInvalidArgument, "channel_norm needs at least one step");
  Tensor2D out(x.channels(), x.time());
  const double n = static_cast<double>(x.time());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    double mean = 0.0;
    for (float v : x.row(c)) mean += v;
    mean /= n;
    double var = 0.0;
    for (float v : x.row(c)) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t t = 0; t < x.time(); ++t)
      out(c, t) = static_cast<float>((x(c, t) - mean) * inv);
  }
  return out;
}

/// Standardisation across channels at each time step. Unlike channel_norm it
/// never looks at other time steps, so it is causal and chunk-invariant.
inline Tensor2D step_norm(const Tensor2D& x, float eps = 1e-5f) {
  const std::size_t C = x.channels();
  const std::size_t T = x.time();
  Tensor2D out(C, T);
  std::vector<double> mean(T, 0.0);
  std::vector<double> var(T, 0.0);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t) mean[t] += x(c, t);
  for (double& m : mean) m /= static_cast<double>(C);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t) var[t] += (x(c, t) - mean[t]) * (x(c, t) - mean[t]);
  for (std::size_t t = 0; t < T; ++t) var[t] = 1.0 / std::sqrt(var[t] / static_cast<double>(C) + eps);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t)
      out(c, t) = static_cast<float>((x(c, t) - mean[t]) * var[t]);
  return out;
}

}  // namespace nesc::nn
