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
#include <span>
#include <string>
#include <vector>

#include "nesc/error.hpp"

namespace nesc {

/// Row-major [channels, time] activation buffer.
class Tensor2D {
 public:
  Tensor2D() = default;
  Tensor2D(std::size_t channels, std::size_t time, float fill = 0.0f)
      : channels_(channels), time_(time), data_(channels * time, fill) {}
  Tensor2D(std::size_t channels, std::size_t time, std::vector<float> data)
      : channels_(channels), time_(time), data_(std::move(data)) {
    require(data_.size() == channels_ * time_, ErrorKind::kShapeMismatch,
            "tensor data size " + std::to_string(data_.size()) +
                " does not match shape [" + std::to_string(channels_) + ", " +
                std::to_string(time_) + "]");
  }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t time() const noexcept { return time_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float& operator()(std::size_t c, std::size_t t) { return data_[c * time_ + t]; }
  float operator()(std::size_t c, std::size_t t) const { return data_[c * time_ + t]; }

  std::span<float> row(std::size_t c) { return {data_.data() + c * time_, time_}; }
  std::span<const float> row(std::size_t c) const {
    return {data_.data() + c * time_, time_};
  }

  std::vector<float> column(std::size_t t) const {
    std::vector<float> out(channels_);
    for (std::size_t c = 0; c < channels_; ++c) out[c] = (*this)(c, t);
    return out;
  }

  void set_column(std::size_t t, std::span<const float> values) {
    require(values.size() == channels_, ErrorKind::kShapeMismatch,
            "column length does not match channel count");
    for (std::size_t c = 0; c < channels_; ++c) (*this)(c, t) = values[c];
  }

  /// Columns [begin, begin + count).
  Tensor2D slice_time(std::size_t begin, std::size_t count) const {
    require(begin + count <= time_, ErrorKind::kInvalidArgument, "time slice out of range");
    Tensor2D out(channels_, count);
    for (std::size_t c = 0; c < channels_; ++c)
      for (std::size_t t = 0; t < count; ++t) out(c, t) = (*this)(c, begin + t);
    return out;
  }

  /// Appends the columns of `other` (same channel count) after this tensor's.
  void append_time(const Tensor2D& other) {
    if (channels_ == 0 && time_ == 0) {
      *this = other;
      return;
    }
    require(other.channels_ == channels_, ErrorKind::kShapeMismatch,
            "append_time channel mismatch");
    std::vector<float> merged(channels_ * (time_ + other.time_));
    for (std::size_t c = 0; c < channels_; ++c) {
      auto a = row(c);
      auto b = other.row(c);
      float* dst = merged.data() + c * (time_ + other.time_);
      std::copy(a.begin(), a.end(), dst);
      std::copy(b.begin(), b.end(), dst + time_);
    }
    time_ += other.time_;
    data_ = std::move(merged);
  }

  bool all_finite() const {
    for (float v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  const std::vector<float>& values() const noexcept { return data_; }

  friend bool operator==(const Tensor2D&, const Tensor2D&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t time_ = 0;
  std::vector<float> data_;
};

}  // namespace nesc
