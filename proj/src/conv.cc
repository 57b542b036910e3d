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

#include "mscaec/conv.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mscaec/status.h"

namespace mscaec {
namespace {

std::string Dims(const ConvLayer& l) {
  return std::to_string(l.kernel_h) + "x" + std::to_string(l.kernel_w) + "x" +
         std::to_string(l.in_channels) + "x" + std::to_string(l.out_channels);
}

void CheckInputChannels(const Tensor& input, const ConvLayer& layer) {
  if (input.channels() != layer.in_channels) {
    throw ConfigError("layer expects " + std::to_string(layer.in_channels) +
                      " input channels, got " +
                      std::to_string(input.channels()));
  }
}

int PadBefore(int in, int out, int kernel, int stride) {
  const int total = std::max((out - 1) * stride + kernel - in, 0);
  return total / 2;
}

float Finish(double acc, const ConvLayer& layer) {
  const float v =
      static_cast<float>(Activate(acc, layer.activation, layer.leaky_slope));
  if (!std::isfinite(v)) throw ConfigError("convolution overflowed");
  return v;
}

}  // namespace

void ConvLayer::Validate() const {
  if (kernel_h <= 0 || kernel_w <= 0 || in_channels <= 0 ||
      out_channels <= 0) {
    throw ConfigError("conv layer dims must be positive, got " +
                      Dims(*this));
  }
  if (stride < 1) throw ConfigError("conv stride must be >= 1");
  const std::size_t expected = static_cast<std::size_t>(kernel_h) * kernel_w *
                               in_channels * out_channels;
  if (weights.size() != expected) {
    throw ConfigError("conv weights length " + std::to_string(weights.size()) +
                      " does not match " + Dims(*this));
  }
  if (bias.size() != static_cast<std::size_t>(out_channels)) {
    throw ConfigError("conv bias length " + std::to_string(bias.size()) +
                      " does not match out_channels " +
                      std::to_string(out_channels));
  }
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(weights.begin(), weights.end(), finite) ||
      !std::all_of(bias.begin(), bias.end(), finite) ||
      !std::isfinite(leaky_slope)) {
    throw ConfigError("conv layer holds non-finite parameters");
  }
}

ConvLayer MakeConvLayer(int kernel_h, int kernel_w, int in_channels,
                        int out_channels, int stride, Activation activation) {
  ConvLayer l;
  l.kernel_h = kernel_h;
  l.kernel_w = kernel_w;
  l.in_channels = in_channels;
  l.out_channels = out_channels;
  l.stride = stride;
  l.activation = activation;
  l.weights.assign(static_cast<std::size_t>(kernel_h) * kernel_w *
                       in_channels * out_channels,
                   0.0f);
  l.bias.assign(out_channels, 0.0f);
  return l;
}

ConvLayer SwapChannelRoles(const ConvLayer& layer) {
  ConvLayer t = MakeConvLayer(layer.kernel_h, layer.kernel_w,
                              layer.out_channels, layer.in_channels,
                              layer.stride, layer.activation);
  t.leaky_slope = layer.leaky_slope;
  for (int ky = 0; ky < layer.kernel_h; ++ky)
    for (int kx = 0; kx < layer.kernel_w; ++kx)
      for (int ci = 0; ci < layer.in_channels; ++ci)
        for (int co = 0; co < layer.out_channels; ++co)
          t.weights[t.WeightIndex(ky, kx, co, ci)] =
              layer.weight(ky, kx, ci, co);
  return t;
}

MaskedConvLayer::MaskedConvLayer(ConvLayer base) : base_(std::move(base)) {
  base_.Validate();
  const int k = base_.kernel_h;
  if (k != base_.kernel_w || (k != 3 && k != 5 && k != 7)) {
    throw ConfigError("masked conv kernel must be square 3, 5 or 7, got " +
                      Dims(base_));
  }
  if (base_.stride != 1) throw ConfigError("masked conv stride must be 1");
  effective_ = base_;
  for (int ky = 0; ky < k; ++ky)
    for (int kx = 0; kx < k; ++kx) {
      if (mask(ky, kx)) continue;
      for (int ci = 0; ci < base_.in_channels; ++ci)
        for (int co = 0; co < base_.out_channels; ++co)
          effective_.weights[effective_.WeightIndex(ky, kx, ci, co)] = 0.0f;
    }
}

int MaskedConvLayer::CountCausalTaps() const {
  int n = 0;
  for (int ky = 0; ky < kernel_size(); ++ky)
    for (int kx = 0; kx < kernel_size(); ++kx) n += mask(ky, kx) ? 1 : 0;
  return n;
}

Tensor Conv2d(const Tensor& input, const ConvLayer& layer) {
  CheckInputChannels(input, layer);
  const int s = layer.stride;
  const int out_h = (input.height() + s - 1) / s;
  const int out_w = (input.width() + s - 1) / s;
  const int pad_y = PadBefore(input.height(), out_h, layer.kernel_h, s);
  const int pad_x = PadBefore(input.width(), out_w, layer.kernel_w, s);
  const int cin = layer.in_channels;
  const int cout = layer.out_channels;

  Tensor out(out_h, out_w, cout);
  std::vector<double> acc(cout);
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      // + 0.0 normalises a -0.0 bias so zero taps never flip a sign bit.
      for (int co = 0; co < cout; ++co) acc[co] = layer.bias[co] + 0.0;
      for (int ky = 0; ky < layer.kernel_h; ++ky) {
        const int iy = oy * s + ky - pad_y;
        if (iy < 0 || iy >= input.height()) continue;
        for (int kx = 0; kx < layer.kernel_w; ++kx) {
          const int ix = ox * s + kx - pad_x;
          if (ix < 0 || ix >= input.width()) continue;
          const auto site = input.Site(iy, ix);
          const float* w = &layer.weights[layer.WeightIndex(ky, kx, 0, 0)];
          for (int ci = 0; ci < cin; ++ci) {
            const double x = site[ci];
            const float* wrow = w + static_cast<std::size_t>(ci) * cout;
            for (int co = 0; co < cout; ++co) acc[co] += x * wrow[co];
          }
        }
      }
      auto dst = out.MutableSite(oy, ox);
      for (int co = 0; co < cout; ++co) dst[co] = Finish(acc[co], layer);
    }
  }
  return out;
}

Tensor TransposedConv2d(const Tensor& input, const ConvLayer& layer) {
  CheckInputChannels(input, layer);
  const int s = layer.stride;
  const int out_h = input.height() * s;
  const int out_w = input.width() * s;
  // Padding of the forward convolution mapping out_h -> input.height().
  const int pad_y = PadBefore(out_h, input.height(), layer.kernel_h, s);
  const int pad_x = PadBefore(out_w, input.width(), layer.kernel_w, s);
  const int cin = layer.in_channels;
  const int cout = layer.out_channels;

  std::vector<double> acc(static_cast<std::size_t>(out_h) * out_w * cout);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    acc[i] = layer.bias[i % cout] + 0.0;
  }
  for (int py = 0; py < input.height(); ++py) {
    for (int px = 0; px < input.width(); ++px) {
      const auto site = input.Site(py, px);
      for (int ky = 0; ky < layer.kernel_h; ++ky) {
        const int ty = py * s + ky - pad_y;
        if (ty < 0 || ty >= out_h) continue;
        for (int kx = 0; kx < layer.kernel_w; ++kx) {
          const int tx = px * s + kx - pad_x;
          if (tx < 0 || tx >= out_w) continue;
          double* dst =
              &acc[(static_cast<std::size_t>(ty) * out_w + tx) * cout];
          const float* w = &layer.weights[layer.WeightIndex(ky, kx, 0, 0)];
          for (int ci = 0; ci < cin; ++ci) {
            const double x = site[ci];
            const float* wrow = w + static_cast<std::size_t>(ci) * cout;
            for (int co = 0; co < cout; ++co) dst[co] += x * wrow[co];
          }
        }
      }
    }
  }
  Tensor out(out_h, out_w, cout);
  auto data = out.mutable_data();
  for (std::size_t i = 0; i < acc.size(); ++i) data[i] = Finish(acc[i], layer);
  return out;
}

Tensor MaskedConv2d(const Tensor& input, const MaskedConvLayer& layer) {
  return Conv2d(input, layer.effective());
}

void PointwiseLayer(std::span<const float> input, const ConvLayer& layer,
                    std::span<float> output) {
  if (layer.kernel_h != 1 || layer.kernel_w != 1 || layer.stride != 1) {
    throw ConfigError("pointwise evaluation needs a 1x1 stride-1 layer");
  }
  if (input.size() != static_cast<std::size_t>(layer.in_channels) ||
      output.size() != static_cast<std::size_t>(layer.out_channels)) {
    throw ConfigError("pointwise layer channel mismatch");
  }
  const int cout = layer.out_channels;
  double acc_small[64];
  std::vector<double> acc_large;
  double* acc = acc_small;
  if (cout > 64) {
    acc_large.resize(cout);
    acc = acc_large.data();
  }
  for (int co = 0; co < cout; ++co) acc[co] = layer.bias[co] + 0.0;
  for (int ci = 0; ci < layer.in_channels; ++ci) {
    const double x = input[ci];
    const float* wrow = &layer.weights[static_cast<std::size_t>(ci) * cout];
    for (int co = 0; co < cout; ++co) acc[co] += x * wrow[co];
  }
  for (int co = 0; co < cout; ++co) output[co] = Finish(acc[co], layer);
}

}  // namespace mscaec
