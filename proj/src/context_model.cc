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

#include "mscaec/context_model.h"

#include <cmath>
#include <string>

#include "mscaec/status.h"

namespace mscaec {
namespace {

constexpr int kHalfWindow = kContextWindow / 2;

// Evaluates one masked branch at the centre of a causal window, writing
// out_channels_each values to `out`.
void BranchAtCentre(std::span<const float> window, int channels,
                    const MaskedConvLayer& layer, std::span<float> out) {
  const ConvLayer& w = layer.base();
  const int cout = w.out_channels;
  const int offset = kHalfWindow - layer.half();
  double acc_small[64];
  std::vector<double> acc_large;
  double* acc = acc_small;
  if (cout > 64) {
    acc_large.resize(cout);
    acc = acc_large.data();
  }
  for (int co = 0; co < cout; ++co) acc[co] = w.bias[co] + 0.0;
  for (int ky = 0; ky < layer.kernel_size(); ++ky) {
    for (int kx = 0; kx < layer.kernel_size(); ++kx) {
      if (!layer.mask(ky, kx)) continue;
      const float* x =
          &window[((ky + offset) * kContextWindow + (kx + offset)) * channels];
      const float* wk = &w.weights[w.WeightIndex(ky, kx, 0, 0)];
      for (int ci = 0; ci < channels; ++ci) {
        const double v = x[ci];
        const float* wrow = wk + static_cast<std::size_t>(ci) * cout;
        for (int co = 0; co < cout; ++co) acc[co] += v * wrow[co];
      }
    }
  }
  for (int co = 0; co < cout; ++co) {
    out[co] = static_cast<float>(Activate(acc[co], w.activation, w.leaky_slope));
    if (!std::isfinite(out[co])) throw ConfigError("context model overflowed");
  }
}

}  // namespace

void ContextModel::Validate() const {
  const MaskedConvLayer* layers[] = {&layer3, &layer5, &layer7};
  const int sizes[] = {3, 5, 7};
  for (int i = 0; i < 3; ++i) {
    layers[i]->base().Validate();
    if (layers[i]->kernel_size() != sizes[i]) {
      throw ConfigError("context branch " + std::to_string(i) +
                        " must have kernel " + std::to_string(sizes[i]));
    }
    if (layers[i]->base().in_channels != in_channels() ||
        layers[i]->base().out_channels != out_channels_each()) {
      throw ConfigError("context branches disagree on channel counts");
    }
  }
}

Tensor ContextFull(const Tensor& latents, const ContextModel& model) {
  if (latents.channels() != model.in_channels()) {
    throw ConfigError("context model expects " +
                      std::to_string(model.in_channels()) +
                      " latent channels, got " +
                      std::to_string(latents.channels()));
  }
  Tensor f3 = MaskedConv2d(latents, model.layer3);
  Tensor f5 = MaskedConv2d(latents, model.layer5);
  Tensor f7 = MaskedConv2d(latents, model.layer7);
  return ConcatChannels(ConcatChannels(f3, f5), f7);
}

std::vector<float> CausalWindow(const Tensor& latents, int row, int col) {
  const int c = latents.channels();
  std::vector<float> window(kContextWindow * kContextWindow * c, 0.0f);
  for (int dy = -kHalfWindow; dy <= 0; ++dy) {
    const int r = row + dy;
    if (r < 0) continue;
    const int dx_end = dy < 0 ? kHalfWindow : -1;
    for (int dx = -kHalfWindow; dx <= dx_end; ++dx) {
      const int cc = col + dx;
      if (cc < 0 || cc >= latents.width()) continue;
      const auto site = latents.Site(r, cc);
      std::copy(site.begin(), site.end(),
                window.begin() + ((dy + kHalfWindow) * kContextWindow +
                                  (dx + kHalfWindow)) *
                                     c);
    }
  }
  return window;
}

void ContextAt(const Tensor& latents, int row, int col,
               const ContextModel& model, std::span<float> out) {
  if (row < 0 || row >= latents.height() || col < 0 ||
      col >= latents.width()) {
    throw ArgumentError("context position (" + std::to_string(row) + ", " +
                        std::to_string(col) + ") out of bounds");
  }
  if (latents.channels() != model.in_channels()) {
    throw ConfigError("context model expects " +
                      std::to_string(model.in_channels()) +
                      " latent channels, got " +
                      std::to_string(latents.channels()));
  }
  if (out.size() != static_cast<std::size_t>(model.out_channels())) {
    throw ArgumentError("context output span has wrong length");
  }
  const std::vector<float> window = CausalWindow(latents, row, col);
  const int each = model.out_channels_each();
  const int c = latents.channels();
  BranchAtCentre(window, c, model.layer3, out.subspan(0, each));
  BranchAtCentre(window, c, model.layer5, out.subspan(each, each));
  BranchAtCentre(window, c, model.layer7, out.subspan(2 * each, each));
}

std::vector<float> ContextAt(const Tensor& latents, int row, int col,
                             const ContextModel& model) {
  std::vector<float> out(model.out_channels());
  ContextAt(latents, row, col, model, out);
  return out;
}

}  // namespace mscaec
