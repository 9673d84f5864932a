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
#include <string>

#include "nesc/nn.hpp"
#include "nesc/tensor_map.hpp"

namespace nesc {

inline nn::ConvParams load_conv(const TensorMap& map, const std::string& prefix, std::size_t out,
                                std::size_t in, std::size_t kernel,
                                nn::Padding padding = nn::Padding::kCausal) {
  const auto u = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
  nn::ConvParams p;
  p.out_ch = out;
  p.in_ch = in;
  p.kernel = kernel;
  p.padding = padding;
  p.weight = map.expect(prefix + ".weight", {u(out), u(in), u(kernel)});
  p.bias = map.expect(prefix + ".bias", {u(out)});
  return p;
}

inline nn::GruParams load_gru(const TensorMap& map, const std::string& prefix, std::size_t in,
                              std::size_t hidden) {
  const auto u = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
  nn::GruParams p;
  p.input = in;
  p.hidden = hidden;
  p.weight_ih = map.expect(prefix + ".weight_ih", {u(3 * hidden), u(in)});
  p.weight_hh = map.expect(prefix + ".weight_hh", {u(3 * hidden), u(hidden)});
  p.bias_ih = map.expect(prefix + ".bias_ih", {u(3 * hidden)});
  p.bias_hh = map.expect(prefix + ".bias_hh", {u(3 * hidden)});
  return p;
}

inline void add_inplace(Tensor2D& acc, const Tensor2D& x) {
  require(acc.channels() == x.channels() && acc.time() == x.time(), ErrorKind::kShapeMismatch,
          "residual add shape mismatch");
  auto a = acc.data();
  auto b = x.data();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

}  // namespace nesc
