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

// Residual vector quantizer: greedy stage-wise nearest-entry search under
// squared Euclidean distance, additive decode, and stage-wise k-means
// codebook learning.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nesc/config.hpp"
#include "nesc/encoder.hpp"
#include "nesc/error.hpp"
#include "nesc/manifest.hpp"
#include "nesc/tensor_map.hpp"

namespace nesc {

inline constexpr std::size_t kMaxLayers = 3;
inline constexpr std::size_t kIndexBits = 10;

/// Codebook indices of one packet, stage order preserved.
struct PacketCodes {
  std::vector<std::uint16_t> indices;

  std::size_t layers() const noexcept { return indices.size(); }

  PacketCodes prefix(std::size_t layers) const {
    require(layers <= indices.size(), ErrorKind::kInvalidLayers, "prefix longer than packet");
    return {{indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(layers)}};
  }

  friend bool operator==(const PacketCodes&, const PacketCodes&) = default;
};

/// Row-major [size, dim] table.
struct Codebook {
  std::size_t size = 0;
  std::size_t dim = 0;
  std::vector<float> entries;

  std::span<const float> entry(std::size_t i) const { return {entries.data() + i * dim, dim}; }
};

namespace detail {

// Lane-parallel accumulation keeps the summation order fixed and lets the
// compiler vectorise without reassociation.
inline constexpr std::size_t kLanes = 8;
inline constexpr std::size_t kBoundCheckEvery = 64;

inline float combine_lanes(const float (&lane)[kLanes]) {
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

/// Squared distance, or any value >= `bound` once the partial sum proves the
/// true distance cannot be below `bound`. Partial sums of non-negative terms
/// only grow, so the early exit never changes which entry wins.
inline float squared_distance_bounded(const float* a, const float* b, std::size_t dim, float bound) {
  float lane[kLanes] = {};
  std::size_t d = 0;
  while (d + kLanes <= dim) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const float diff = a[d + l] - b[d + l];
      lane[l] += diff * diff;
    }
    d += kLanes;
    if (d % kBoundCheckEvery == 0 && d < dim && combine_lanes(lane) >= bound) return combine_lanes(lane);
  }
  for (std::size_t l = 0; d < dim; ++d, ++l) {
    const float diff = a[d] - b[d];
    lane[l] += diff * diff;
  }
  return combine_lanes(lane);
}

inline float squared_distance(const float* a, const float* b, std::size_t dim) {
  return squared_distance_bounded(a, b, dim, INFINITY);
}

}  // namespace detail

struct Nearest {
  std::size_t index = 0;
  float distance = INFINITY;
};

/// Exhaustive nearest entry; ties go to the lowest index.
inline Nearest nearest_entry(const Codebook& book, std::span<const float> x) {
  Nearest best;
  for (std::size_t i = 0; i < book.size; ++i) {
    const float d =
        detail::squared_distance_bounded(x.data(), book.entries.data() + i * book.dim, book.dim,
                                         best.distance);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

class RvqModel {
 public:
  RvqModel() = default;
  explicit RvqModel(std::vector<Codebook> books) : books_(std::move(books)) {
    require(!books_.empty() && books_.size() <= kMaxLayers, ErrorKind::kInvalidArgument,
            "RVQ model needs 1..3 codebooks");
    for (const auto& b : books_) {
      require(b.dim == books_[0].dim, ErrorKind::kShapeMismatch, "codebook dimensions differ");
      require(b.size >= 1 && b.size <= (std::size_t{1} << kIndexBits), ErrorKind::kShapeMismatch,
              "codebook size must be in [1, 1024]");
      require(b.entries.size() == b.size * b.dim, ErrorKind::kShapeMismatch,
              "codebook storage does not match [size, dim]");
      for (float v : b.entries)
        require(std::isfinite(v), ErrorKind::kInvalidArgument, "codebook entries must be finite");
    }
  }

  static RvqModel from_weights(const TensorMap& map, const RvqConfig& cfg = {}) {
    cfg.validate();
    std::vector<Codebook> books;
    for (std::size_t s = 0; s < cfg.stages; ++s) {
      const auto& data = map.expect(names::codebook(s),
                                    {static_cast<std::uint32_t>(cfg.codebook_size()),
                                     static_cast<std::uint32_t>(cfg.dim)});
      books.push_back({cfg.codebook_size(), cfg.dim, data});
    }
    return RvqModel(std::move(books));
  }

  void store(TensorMap& map) const {
    for (std::size_t s = 0; s < books_.size(); ++s) map.assign(names::codebook(s), books_[s].entries);
  }

  std::size_t stages() const noexcept { return books_.size(); }
  std::size_t dim() const noexcept { return books_.empty() ? 0 : books_[0].dim; }
  const Codebook& codebook(std::size_t s) const { return books_.at(s); }

 private:
  std::vector<Codebook> books_;
};

/// Greedy residual search: each stage picks the entry nearest to what the
/// previous stages left over.
inline PacketCodes quantize(std::span<const float> z, const RvqModel& model, std::size_t layers) {
  require(layers >= 1 && layers <= model.stages(), ErrorKind::kInvalidLayers,
          "layers must be in [1, " + std::to_string(model.stages()) + "], got " +
              std::to_string(layers));
  require(z.size() == model.dim(), ErrorKind::kShapeMismatch, "latent dimension mismatch");
  for (float v : z) require(!std::isnan(v), ErrorKind::kInvalidArgument, "latent contains NaN");
  std::vector<float> residual(z.begin(), z.end());
  PacketCodes codes;
  for (std::size_t s = 0; s < layers; ++s) {
    const Codebook& book = model.codebook(s);
    const Nearest hit = nearest_entry(book, residual);
    codes.indices.push_back(static_cast<std::uint16_t>(hit.index));
    auto e = book.entry(hit.index);
    for (std::size_t d = 0; d < residual.size(); ++d) residual[d] -= e[d];
  }
  return codes;
}

/// Sum of the selected entries, accumulated in stage order.
inline std::vector<float> dequantize(const PacketCodes& codes, const RvqModel& model) {
  require(codes.layers() <= model.stages(), ErrorKind::kInvalidLayers,
          "packet has more layers than the model");
  std::vector<float> out(model.dim(), 0.0f);
  for (std::size_t s = 0; s < codes.layers(); ++s) {
    const Codebook& book = model.codebook(s);
    require(codes.indices[s] < book.size, ErrorKind::kInvalidArgument,
            "index " + std::to_string(codes.indices[s]) + " out of range for codebook " +
                std::to_string(s));
    auto e = book.entry(codes.indices[s]);
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += e[d];
  }
  return out;
}

inline double stage_error(std::span<const float> z, const RvqModel& model, std::size_t layers) {
  const auto approx = dequantize(quantize(z, model, layers), model);
  double err = 0.0;
  for (std::size_t d = 0; d < z.size(); ++d) {
    const double diff = static_cast<double>(z[d]) - approx[d];
    err += diff * diff;
  }
  return err;
}

inline std::vector<PacketCodes> quantize_all(const LatentSequence& latents, const RvqModel& model,
                                             std::size_t layers) {
  std::vector<PacketCodes> out;
  out.reserve(latents.packets());
  for (std::size_t t = 0; t < latents.packets(); ++t)
    out.push_back(quantize(latents.latents.column(t), model, layers));
  return out;
}

inline LatentSequence dequantize_all(const std::vector<PacketCodes>& codes, const RvqModel& model) {
  Tensor2D out(model.dim(), codes.size());
  for (std::size_t t = 0; t < codes.size(); ++t) out.set_column(t, dequantize(codes[t], model));
  return {std::move(out)};
}

// ---------------------------------------------------------------------------
// Codebook learning

struct KMeansResult {
  Codebook centroids;
  std::vector<std::size_t> assignment;
  /// Mean squared distortion after each assignment step (one per iteration).
  std::vector<double> distortion;
  /// Mean squared distortion against the returned centroids.
  double final_distortion = 0.0;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// k-means++: first centre uniform, each next one drawn with probability
// proportional to the squared distance to the nearest chosen centre.
inline Codebook kmeanspp_seed(const std::vector<float>& points, std::size_t n, std::size_t dim,
                              std::size_t k, std::mt19937_64& rng) {
  Codebook c{k, dim, std::vector<float>(k * dim)};
  std::vector<double> d2(n, INFINITY);
  std::vector<char> chosen(n, 0);
  auto take = [&](std::size_t slot, std::size_t p) {
    chosen[p] = 1;
    std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(p * dim), dim,
                c.entries.begin() + static_cast<std::ptrdiff_t>(slot * dim));
    for (std::size_t i = 0; i < n; ++i) {
      const double d = squared_distance(points.data() + i * dim, points.data() + p * dim, dim);
      d2[i] = std::min(d2[i], d);
    }
  };
  take(0, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n);
  for (std::size_t slot = 1; slot < k; ++slot) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!chosen[i]) total += d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] <= 0.0) continue;
        pick = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    }
    if (pick == n) {
      // Every remaining point coincides with a centre; take the first unused.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
    }
    take(slot, pick);
  }
  return c;
}

inline double assign_points(const std::vector<float>& points, std::size_t n, const Codebook& c,
                            std::vector<std::size_t>& assignment, std::vector<double>& dist) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Nearest hit = nearest_entry(c, {points.data() + i * c.dim, c.dim});
    assignment[i] = hit.index;
    dist[i] = hit.distance;
    total += hit.distance;
  }
  return total / static_cast<double>(n);
}

}  // namespace detail

/// Lloyd's algorithm on row-major `points` [n, dim] with k-means++ seeding.
/// Empty clusters are re-seeded at the points with the largest distortion.
inline KMeansResult kmeans(const std::vector<float>& points, std::size_t dim, std::size_t k,
                           std::size_t iters, std::mt19937_64& rng) {
  require(dim > 0 && points.size() % dim == 0, ErrorKind::kShapeMismatch, "bad point matrix");
  const std::size_t n = points.size() / dim;
  require(k >= 1, ErrorKind::kInvalidArgument, "k must be >= 1");
  require(n >= k, ErrorKind::kInvalidArgument,
          "need at least " + std::to_string(k) + " vectors, got " + std::to_string(n));
  require(iters >= 1, ErrorKind::kInvalidArgument, "iterations must be >= 1");

  KMeansResult r;
  r.centroids = detail::kmeanspp_seed(points, n, dim, k, rng);
  r.assignment.assign(n, 0);
  std::vector<double> dist(n);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 0; it < iters; ++it) {
    r.distortion.push_back(detail::assign_points(points, n, r.centroids, r.assignment, dist));
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = r.assignment[i];
      ++counts[a];
      for (std::size_t d = 0; d < dim; ++d) sums[a * dim + d] += points[i * dim + d];
    }
    std::vector<std::size_t> worst(n);
    std::iota(worst.begin(), worst.end(), std::size_t{0});
    std::stable_sort(worst.begin(), worst.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    std::size_t next_worst = 0;
    for (std::size_t j = 0; j < k; ++j) {
      float* centre = r.centroids.entries.data() + j * dim;
      if (counts[j] > 0) {
        for (std::size_t d = 0; d < dim; ++d)
          centre[d] = static_cast<float>(sums[j * dim + d] / static_cast<double>(counts[j]));
      } else if (next_worst < n && dist[worst[next_worst]] > 0.0) {
        const std::size_t p = worst[next_worst++];
        std::copy_n(points.data() + p * dim, dim, centre);
      }
    }
  }
  r.final_distortion = detail::assign_points(points, n, r.centroids, r.assignment, dist);
  return r;
}

struct TrainOptions {
  std::size_t stages = 3;
  std::size_t codebook_size = 1024;
  std::size_t iters = 20;
  std::uint64_t seed = 0;
};

struct TrainReport {
  RvqModel model;
  /// Per stage: mean distortion after each Lloyd iteration.
  std::vector<std::vector<double>> iteration_distortion;
  /// Per stage: mean squared residual left after that stage.
  std::vector<double> stage_distortion;
};

/// Stage-wise codebook learning: k-means on the current residuals, subtract
/// the assigned centroids, repeat for the next stage.
inline TrainReport train_codebooks(const LatentSequence& latents, const TrainOptions& opt) {
  require(opt.stages >= 1 && opt.stages <= kMaxLayers, ErrorKind::kInvalidArgument,
          "stages must be in [1, 3]");
  require(opt.iters >= 1, ErrorKind::kInvalidArgument, "iterations must be >= 1");
  const std::size_t n = latents.packets();
  const std::size_t dim = latents.dim();
  require(n >= opt.codebook_size, ErrorKind::kInvalidArgument,
          "codebook training needs at least " + std::to_string(opt.codebook_size) +
              " latent vectors, got " + std::to_string(n));
  std::vector<float> residual(n * dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) residual[i * dim + d] = latents.latents(d, i);

  std::mt19937_64 rng(opt.seed);
  TrainReport report;
  std::vector<Codebook> books;
  for (std::size_t s = 0; s < opt.stages; ++s) {
    KMeansResult km = kmeans(residual, dim, opt.codebook_size, opt.iters, rng);
    for (std::size_t i = 0; i < n; ++i) {
      auto e = km.centroids.entry(km.assignment[i]);
      for (std::size_t d = 0; d < dim; ++d) residual[i * dim + d] -= e[d];
    }
    report.iteration_distortion.push_back(km.distortion);
    report.stage_distortion.push_back(km.final_distortion);
    books.push_back(std::move(km.centroids));
  }
  report.model = RvqModel(std::move(books));
  return report;
}

}  // namespace nesc
