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

// Four-band pseudo-QMF filterbank built from a Kaiser-windowed sinc
// prototype by cosine modulation:
//
//   analysis  h_k[n] = 2 p[n] cos((2k+1) pi/(2K) (n - (N-1)/2) + (-1)^k pi/4)
//   synthesis g_k[n] = 2 p[n] cos((2k+1) pi/(2K) (n - (N-1)/2) - (-1)^k pi/4)
//
// analyze -> synthesize reproduces the input delayed by N-1 samples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nesc/error.hpp"
#include "nesc/framing.hpp"
#include "nesc/tensor.hpp"

namespace nesc {

inline constexpr std::size_t kSubbands = 4;

struct PqmfBank {
  std::size_t taps = 0;
  double cutoff = 0.0;  // prototype cutoff, radians/sample
  double beta = 0.0;    // Kaiser shape
  std::vector<double> prototype;
  std::vector<std::vector<double>> analysis;   // [4][taps]
  std::vector<std::vector<double>> synthesis;  // [4][taps]

  /// Group delay of the analysis+synthesis cascade.
  std::size_t round_trip_delay() const { return taps - 1; }
  /// Half of the cascade delay is attributed to the synthesis side.
  std::size_t synthesis_lookahead() const { return taps / 2; }
};

namespace detail {

inline double kaiser_beta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db >= 21.0)
    return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) + 0.07886 * (attenuation_db - 21.0);
  return 0.0;
}

inline std::vector<double> kaiser_sinc(std::size_t taps, double cutoff, double beta) {
  std::vector<double> h(taps);
  const double centre = (static_cast<double>(taps) - 1.0) / 2.0;
  const double norm = std::cyl_bessel_i(0.0, beta);
  for (std::size_t n = 0; n < taps; ++n) {
    const double m = static_cast<double>(n) - centre;
    const double r = 2.0 * static_cast<double>(n) / (static_cast<double>(taps) - 1.0) - 1.0;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
    const double sinc = m == 0.0 ? cutoff / std::numbers::pi : std::sin(cutoff * m) / (std::numbers::pi * m);
    h[n] = sinc * window;
  }
  return h;
}

inline void modulate(PqmfBank& bank) {
  const double centre = (static_cast<double>(bank.taps) - 1.0) / 2.0;
  bank.analysis.assign(kSubbands, std::vector<double>(bank.taps));
  bank.synthesis.assign(kSubbands, std::vector<double>(bank.taps));
  for (std::size_t k = 0; k < kSubbands; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t n = 0; n < bank.taps; ++n) {
      const double phase = (2.0 * static_cast<double>(k) + 1.0) * std::numbers::pi /
                           (2.0 * kSubbands) * (static_cast<double>(n) - centre);
      bank.analysis[k][n] = 2.0 * bank.prototype[n] * std::cos(phase + sign * std::numbers::pi / 4.0);
      bank.synthesis[k][n] = 2.0 * bank.prototype[n] * std::cos(phase - sign * std::numbers::pi / 4.0);
    }
  }
}

/// Evaluates max | |T(w)| - 1 | of the alias-free cascade response
/// T = sum_k G_k H_k on a uniform grid over [0, pi].
class DistortionMeter {
 public:
  DistortionMeter(std::size_t taps, std::size_t points) : len_(2 * taps - 1), points_(points) {
    cos_.resize(points * len_);
    sin_.resize(points * len_);
    for (std::size_t p = 0; p < points; ++p) {
      const double w = std::numbers::pi * static_cast<double>(p) / static_cast<double>(points - 1);
      for (std::size_t n = 0; n < len_; ++n) {
        cos_[p * len_ + n] = std::cos(w * static_cast<double>(n));
        sin_[p * len_ + n] = std::sin(w * static_cast<double>(n));
      }
    }
  }

  std::vector<double> magnitude(const PqmfBank& bank) const {
    const std::vector<double> t = composite(bank);
    std::vector<double> mag(points_);
    for (std::size_t p = 0; p < points_; ++p) {
      double re = 0.0;
      double im = 0.0;
      for (std::size_t n = 0; n < len_; ++n) {
        re += t[n] * cos_[p * len_ + n];
        im -= t[n] * sin_[p * len_ + n];
      }
      mag[p] = std::hypot(re, im);
    }
    return mag;
  }

  double worst_deviation(const PqmfBank& bank) const {
    double worst = 0.0;
    for (double m : magnitude(bank)) worst = std::max(worst, std::abs(m - 1.0));
    return worst;
  }

  static std::vector<double> composite(const PqmfBank& bank) {
    std::vector<double> t(2 * bank.taps - 1, 0.0);
    for (std::size_t k = 0; k < kSubbands; ++k)
      for (std::size_t i = 0; i < bank.taps; ++i)
        for (std::size_t j = 0; j < bank.taps; ++j) t[i + j] += bank.synthesis[k][i] * bank.analysis[k][j];
    return t;
  }

 private:
  std::size_t len_;
  std::size_t points_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

inline PqmfBank make_bank(std::size_t taps, double cutoff, double beta) {
  PqmfBank bank;
  bank.taps = taps;
  bank.cutoff = cutoff;
  bank.beta = beta;
  bank.prototype = kaiser_sinc(taps, cutoff, beta);
  modulate(bank);
  return bank;
}

}  // namespace detail

/// Kaiser-windowed sinc prototype whose cutoff is chosen by a grid search
/// followed by golden-section refinement to minimise the worst amplitude
/// deviation of the cascade response.
inline PqmfBank design_pqmf(std::size_t taps = 100, double attenuation_db = 100.0) {
  require(taps >= 16, ErrorKind::kInvalidArgument, "PQMF prototype needs at least 16 taps");
  require(attenuation_db > 0.0, ErrorKind::kInvalidArgument, "attenuation must be positive");
  const double beta = detail::kaiser_beta(attenuation_db);
  const detail::DistortionMeter meter(taps, 512);
  const double nominal = std::numbers::pi / (2.0 * kSubbands);
  auto cost = [&](double wc) { return meter.worst_deviation(detail::make_bank(taps, wc, beta)); };

  constexpr int kGrid = 200;
  const double lo = 0.5 * nominal;
  const double hi = 1.5 * nominal;
  const double step = (hi - lo) / kGrid;
  int best = 0;
  double best_cost = INFINITY;
  for (int i = 0; i <= kGrid; ++i) {
    const double c = cost(lo + step * i);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  double a = lo + step * std::max(0, best - 1);
  double b = lo + step * std::min(kGrid, best + 1);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = cost(x1);
  double f2 = cost(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = cost(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = cost(x2);
    }
  }
  double wc = 0.5 * (a + b);
  if (cost(wc) > best_cost) wc = lo + step * best;
  return detail::make_bank(taps, wc, beta);
}

/// Default 100-tap bank, designed once per process.
inline const PqmfBank& default_pqmf() {
  static const PqmfBank bank = design_pqmf();
  return bank;
}

/// Polyphase analysis: band k sample m is (h_k * x)[4m]. The input is
/// zero-padded to a multiple of four.
inline Tensor2D analyze(std::span<const float> x, const PqmfBank& bank) {
  const std::size_t frames = (x.size() + kSubbands - 1) / kSubbands;
  Tensor2D out(kSubbands, frames);
  for (std::size_t k = 0; k < kSubbands; ++k) {
    const auto& h = bank.analysis[k];
    for (std::size_t m = 0; m < frames; ++m) {
      const std::size_t n = m * kSubbands;
      double acc = 0.0;
      for (std::size_t j = 0; j < bank.taps && j <= n; ++j) {
        const std::size_t pos = n - j;
        if (pos < x.size()) acc += h[j] * x[pos];
      }
      out(k, m) = static_cast<float>(acc);
    }
  }
  return out;
}

inline Tensor2D analyze(const AudioBuffer& x, const PqmfBank& bank) {
  return analyze(std::span<const float>(x.samples), bank);
}

/// Streaming synthesis: each block of m sub-band samples per band yields
/// 4m output samples immediately. The output sample at n reads only
/// sub-band samples at or before n/4, so no future input is buffered.
class PqmfSynthesizer {
 public:
  explicit PqmfSynthesizer(const PqmfBank& bank)
      : bank_(&bank),
        history_len_((bank.taps + kSubbands - 1) / kSubbands),
        history_(kSubbands, std::vector<float>(history_len_, 0.0f)) {}

  std::vector<float> push(const Tensor2D& bands) {
    require(bands.channels() == kSubbands, ErrorKind::kShapeMismatch,
            "synthesis expects 4 sub-bands, got " + std::to_string(bands.channels()));
    const std::size_t m_count = bands.time();
    const std::size_t H = history_len_;
    // Per band: [history | new samples]; index H + q is the current block's q.
    std::vector<std::vector<float>> ext(kSubbands);
    for (std::size_t k = 0; k < kSubbands; ++k) {
      ext[k] = history_[k];
      auto r = bands.row(k);
      ext[k].insert(ext[k].end(), r.begin(), r.end());
    }
    std::vector<float> out(m_count * kSubbands);
    for (std::size_t q = 0; q < m_count; ++q) {
      for (std::size_t r = 0; r < kSubbands; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kSubbands; ++k) {
          const auto& g = bank_->synthesis[k];
          for (std::size_t i = 0; r + kSubbands * i < bank_->taps; ++i)
            acc += g[r + kSubbands * i] * ext[k][q + H - i];
        }
        out[q * kSubbands + r] = static_cast<float>(kSubbands * acc);
      }
    }
    for (std::size_t k = 0; k < kSubbands; ++k)
      std::copy(ext[k].end() - static_cast<std::ptrdiff_t>(H), ext[k].end(), history_[k].begin());
    return out;
  }

 private:
  const PqmfBank* bank_;
  std::size_t history_len_;
  std::vector<std::vector<float>> history_;
};

inline AudioBuffer synthesize(const Tensor2D& bands, const PqmfBank& bank) {
  PqmfSynthesizer synth(bank);
  return {synth.push(bands), kSampleRateHz};
}

}  // namespace nesc
