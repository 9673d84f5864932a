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

#include "nesc/bitstream.hpp"
#include "nesc/codec.hpp"
#include "nesc/config.hpp"
#include "nesc/decoder.hpp"
#include "nesc/encoder.hpp"
#include "nesc/error.hpp"
#include "nesc/framing.hpp"
#include "nesc/manifest.hpp"
#include "nesc/nn.hpp"
#include "nesc/pqmf.hpp"
#include "nesc/rvq.hpp"
#include "nesc/tensor.hpp"
#include "nesc/tensor_map.hpp"
#include "nesc/wav.hpp"
