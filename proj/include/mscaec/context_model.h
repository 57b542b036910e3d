// Copyright 2026 The mscaec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Multi-scale autoregressive context model: three parallel masked
// convolutions (3x3, 5x5, 7x7) over the latent tensor whose outputs are
// concatenated in that order. Sites at Chebyshev distance 1 from the current
// point are seen by all three kernels, distance 2 by the 5x5 and 7x7 kernels,
// distance 3 by the 7x7 kernel only.

#ifndef MSCAEC_CONTEXT_MODEL_H_
#define MSCAEC_CONTEXT_MODEL_H_

#include <span>
#include <vector>

#include "mscaec/conv.h"
#include "mscaec/tensor.h"

namespace mscaec {

// Side of the square window that covers the largest kernel.
inline constexpr int kContextWindow = 7;

struct ContextModel {
  MaskedConvLayer layer3;
  MaskedConvLayer layer5;
  MaskedConvLayer layer7;

  int in_channels() const { return layer3.base().in_channels; }
  int out_channels_each() const { return layer3.base().out_channels; }
  int out_channels() const { return 3 * out_channels_each(); }

  // Checks kernel sizes and that the branches agree on channel counts.
  void Validate() const;
};

// Reference path: full masked convolutions over the whole tensor.
Tensor ContextFull(const Tensor& latents, const ContextModel& model);

// Cropped path used while decoding. Reads only the 7x7 window of sites
// strictly before (row, col) in raster order and evaluates the three kernels
// at the window centre. `out` must hold out_channels() values and ends up
// bit-identical to ContextFull(latents).Site(row, col).
void ContextAt(const Tensor& latents, int row, int col,
               const ContextModel& model, std::span<float> out);
std::vector<float> ContextAt(const Tensor& latents, int row, int col,
                             const ContextModel& model);

// The zero-padded 7x7 x channels window around (row, col) with every entry
// at or after the centre in raster order zeroed. Layout [dy][dx][channel].
std::vector<float> CausalWindow(const Tensor& latents, int row, int col);

}  // namespace mscaec

#endif  // MSCAEC_CONTEXT_MODEL_H_
