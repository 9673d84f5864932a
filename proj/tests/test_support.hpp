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

// Shared helpers for the unit and acceptance suites: seeded data, a small
// model configuration for fast pipeline tests, and naive reference
// implementations that the optimised kernels are checked against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nesc/nesc.hpp"

namespace nesc::testing {

inline std::vector<float> random_vector(std::size_t n, std::uint64_t seed, float scale = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-scale, scale);
  std::vector<float> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline Tensor2D random_tensor(std::size_t channels, std::size_t time, std::uint64_t seed,
                              float scale = 1.0f) {
  return Tensor2D(channels, time, random_vector(channels * time, seed, scale));
}

inline nn::ConvParams random_conv(std::size_t out, std::size_t in, std::size_t kernel,
                                  std::uint64_t seed, nn::Padding padding = nn::Padding::kCausal) {
  nn::ConvParams p;
  p.out_ch = out;
  p.in_ch = in;
  p.kernel = kernel;
  p.padding = padding;
  p.weight = random_vector(out * in * kernel, seed, 0.5f);
  p.bias = random_vector(out, seed + 1, 0.5f);
  return p;
}

inline nn::GruParams random_gru(std::size_t in, std::size_t hidden, std::uint64_t seed) {
  nn::GruParams p;
  p.input = in;
  p.hidden = hidden;
  p.weight_ih = random_vector(3 * hidden * in, seed, 0.5f);
  p.weight_hh = random_vector(3 * hidden * hidden, seed + 1, 0.5f);
  p.bias_ih = random_vector(3 * hidden, seed + 2, 0.5f);
  p.bias_hh = random_vector(3 * hidden, seed + 3, 0.5f);
  return p;
}

inline AudioBuffer white_noise(std::size_t samples, std::uint64_t seed, float stddev = 0.1f) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, stddev);
  AudioBuffer a;
  a.samples.resize(samples);
  for (auto& s : a.samples) s = std::clamp(dist(rng), -1.0f, 1.0f);
  return a;
}

/// Same topology as the default model with narrow layers; keeps pipeline
/// tests fast while exercising every code path.
inline CodecConfig small_config() {
  CodecConfig c;
  c.encoder.frontend_conv1_ch = 32;
  c.encoder.frontend_gru_hidden = 16;
  c.encoder.frontend_conv2_ch = 16;
  c.encoder.residual_blocks = 2;
  c.encoder.residual_ch = 16;
  c.encoder.latent_dim = 16;
  c.decoder.latent_dim = 16;
  c.decoder.prenet_hidden = 16;
  c.decoder.conditioning_ch = 16;
  c.decoder.prior_ch = 16;
  c.decoder.block_channels = {16, 12, 8, 8};
  c.rvq.dim = 16;
  c.rvq.bits = 4;
  return c;
}

inline TensorMap small_weights(std::uint64_t seed = 7) {
  return random_weights(codec_manifest(small_config()), seed);
}

inline std::filesystem::path data_dir() { return NESC_TEST_DATA_DIR; }

// ---------------------------------------------------------------------------
// Reference oracles. Written for clarity, in double precision, with no
// sharing of code paths with the library kernels.
namespace oracle {

inline std::vector<std::vector<double>> conv1d(const Tensor2D& x, const nn::ConvParams& p) {
  const long T = static_cast<long>(x.time());
  const long K = static_cast<long>(p.kernel);
  const long shift = (p.padding == nn::Padding::kCausal || K == 1) ? K - 1 : (K - 1) / 2;
  std::vector<std::vector<double>> y(p.out_ch, std::vector<double>(x.time()));
  for (std::size_t o = 0; o < p.out_ch; ++o) {
    for (long t = 0; t < T; ++t) {
      double acc = p.bias[o];
      for (std::size_t i = 0; i < p.in_ch; ++i) {
        for (long k = 0; k < K; ++k) {
          const long src = t - shift + k;
          if (src >= 0 && src < T) acc += static_cast<double>(p.w(o, i, static_cast<std::size_t>(k))) *
                                          x(i, static_cast<std::size_t>(src));
        }
      }
      y[o][static_cast<std::size_t>(t)] = acc;
    }
  }
  return y;
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// Textbook GRU step with gates (reset, update, new).
inline std::vector<std::vector<double>> gru(const Tensor2D& x, const nn::GruParams& p,
                                            std::vector<double> h) {
  const std::size_t H = p.hidden;
  std::vector<std::vector<double>> out(H, std::vector<double>(x.time()));
  for (std::size_t t = 0; t < x.time(); ++t) {
    auto in_gate = [&](std::size_t row) {
      double acc = p.bias_ih[row];
      for (std::size_t i = 0; i < p.input; ++i) acc += p.weight_ih[row * p.input + i] * x(i, t);
      return acc;
    };
    auto rec_gate = [&](std::size_t row) {
      double acc = p.bias_hh[row];
      for (std::size_t k = 0; k < H; ++k) acc += p.weight_hh[row * H + k] * h[k];
      return acc;
    };
    std::vector<double> next(H);
    for (std::size_t j = 0; j < H; ++j) {
      const double r = sigmoid(in_gate(j) + rec_gate(j));
      const double z = sigmoid(in_gate(H + j) + rec_gate(H + j));
      const double n = std::tanh(in_gate(2 * H + j) + r * rec_gate(2 * H + j));
      next[j] = (1.0 - z) * n + z * h[j];
    }
    h = next;
    for (std::size_t j = 0; j < H; ++j) out[j][t] = h[j];
  }
  return out;
}

inline std::vector<std::vector<double>> softmax_gated_tanh(const Tensor2D& a, const Tensor2D& b) {
  std::vector<std::vector<double>> y(a.channels(), std::vector<double>(a.time()));
  for (std::size_t t = 0; t < a.time(); ++t) {
    double denom = 0.0;
    for (std::size_t c = 0; c < a.channels(); ++c) denom += std::exp(static_cast<double>(b(c, t)));
    for (std::size_t c = 0; c < a.channels(); ++c)
      y[c][t] = std::tanh(static_cast<double>(a(c, t))) * std::exp(static_cast<double>(b(c, t))) / denom;
  }
  return y;
}

inline std::vector<std::vector<double>> upsample(const Tensor2D& x, std::size_t factor) {
  std::vector<std::vector<double>> y(x.channels());
  for (std::size_t c = 0; c < x.channels(); ++c)
    for (std::size_t t = 0; t < x.time() * factor; ++t) y[c].push_back(x(c, t / factor));
  return y;
}

inline std::vector<std::vector<double>> channel_norm(const Tensor2D& x, double eps) {
  std::vector<std::vector<double>> y(x.channels(), std::vector<double>(x.time()));
  for (std::size_t c = 0; c < x.channels(); ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < x.time(); ++t) mean += x(c, t);
    mean /= static_cast<double>(x.time());
    double var = 0.0;
    for (std::size_t t = 0; t < x.time(); ++t) var += std::pow(x(c, t) - mean, 2);
    var /= static_cast<double>(x.time());
    for (std::size_t t = 0; t < x.time(); ++t) y[c][t] = (x(c, t) - mean) / std::sqrt(var + eps);
  }
  return y;
}

inline double max_abs_diff(const Tensor2D& got, const std::vector<std::vector<double>>& want) {
  double worst = 0.0;
  for (std::size_t c = 0; c < got.channels(); ++c)
    for (std::size_t t = 0; t < got.time(); ++t)
      worst = std::max(worst, std::abs(static_cast<double>(got(c, t)) - want[c][t]));
  return worst;
}

/// Exhaustive nearest entry in double precision; ties to the lowest index.
inline std::size_t argmin_entry(const Codebook& book, const std::vector<double>& r) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < book.size; ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < book.dim; ++k) {
      const double diff = r[k] - book.entries[i * book.dim + k];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

/// Full-rate filtering followed by keeping every fourth sample.
inline std::vector<std::vector<double>> filter_then_decimate(const std::vector<float>& x,
                                                             const PqmfBank& bank) {
  std::vector<float> padded = x;
  padded.resize((x.size() + 3) / 4 * 4, 0.0f);
  std::vector<std::vector<double>> out(4);
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> full(padded.size(), 0.0);
    for (std::size_t n = 0; n < padded.size(); ++n)
      for (std::size_t j = 0; j < bank.taps && j <= n; ++j) full[n] += bank.analysis[k][j] * padded[n - j];
    for (std::size_t n = 0; n < full.size(); n += 4) out[k].push_back(full[n]);
  }
  return out;
}

/// Zero-insertion upsampling, synthesis filtering and summation, gain 4.
inline std::vector<double> upsample_then_filter(const Tensor2D& bands, const PqmfBank& bank) {
  const std::size_t n_out = bands.time() * 4;
  std::vector<double> y(n_out, 0.0);
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> up(n_out, 0.0);
    for (std::size_t m = 0; m < bands.time(); ++m) up[4 * m] = bands(k, m);
    for (std::size_t n = 0; n < n_out; ++n)
      for (std::size_t j = 0; j < bank.taps && j <= n; ++j) y[n] += 4.0 * bank.synthesis[k][j] * up[n - j];
  }
  return y;
}

}  // namespace oracle

/// SNR in dB of `got` against `ref` after shifting `got` left by `delay`.
inline double aligned_snr_db(const std::vector<float>& ref, const std::vector<float>& got,
                             std::size_t delay) {
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t n = 0; n + delay < got.size() && n < ref.size(); ++n) {
    signal += static_cast<double>(ref[n]) * ref[n];
    const double e = static_cast<double>(got[n + delay]) - ref[n];
    noise += e * e;
  }
  return 10.0 * std::log10(signal / noise);
}

}  // namespace nesc::testing
