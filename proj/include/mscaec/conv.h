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

// Convolution primitives for entropy-model inference.
//
// Numeric policy: every output value is accumulated in double precision,
// starting from the bias and adding input*weight products in (ky, kx, ci)
// order, then passed through the activation and rounded to float. Products
// of two floats are exact in double, so results do not depend on whether the
// compiler fuses multiply-adds. Taps that fall outside the input or under a
// mask contribute a signed zero, which never changes a non-zero accumulator;
// that is what lets the cropped context path reproduce full convolutions
// bit for bit.

#ifndef MSCAEC_CONV_H_
#define MSCAEC_CONV_H_

#include <cstddef>
#include <span>
#include <vector>

#include "mscaec/tensor.h"

namespace mscaec {

enum class Activation { kNone, kLeakyRelu };

inline constexpr float kDefaultLeakySlope = 0.01f;

struct ConvLayer {
  int kernel_h = 1;
  int kernel_w = 1;
  int in_channels = 1;
  int out_channels = 1;
  int stride = 1;
  // Layout [kernel_h][kernel_w][in_channels][out_channels].
  std::vector<float> weights;
  std::vector<float> bias;
  Activation activation = Activation::kNone;
  float leaky_slope = kDefaultLeakySlope;

  std::size_t WeightIndex(int ky, int kx, int ci, int co) const {
    return ((static_cast<std::size_t>(ky) * kernel_w + kx) * in_channels +
            ci) *
               out_channels +
           co;
  }
  float weight(int ky, int kx, int ci, int co) const {
    return weights[WeightIndex(ky, kx, ci, co)];
  }

  // Throws ConfigError when the declared dims and buffers disagree.
  void Validate() const;
};

// Zero-initialised layer of the given geometry.
ConvLayer MakeConvLayer(int kernel_h, int kernel_w, int in_channels,
                        int out_channels, int stride = 1,
                        Activation activation = Activation::kNone);

// Same kernel with input and output channel roles swapped. This is the layer
// whose transposed convolution is the adjoint of `layer`'s convolution.
ConvLayer SwapChannelRoles(const ConvLayer& layer);

// Applies the activation in double precision.
inline double Activate(double v, Activation activation, float slope) {
  if (activation == Activation::kLeakyRelu && v < 0.0) {
    return v * static_cast<double>(slope);
  }
  return v;
}

// Square, odd, stride-1 convolution whose kernel is zero at and after the
// centre in raster order.
class MaskedConvLayer {
 public:
  MaskedConvLayer() = default;
  // Throws ConfigError unless base is square with size 3, 5 or 7, stride 1.
  explicit MaskedConvLayer(ConvLayer base);

  const ConvLayer& base() const { return base_; }
  // Base weights multiplied by the mask.
  const ConvLayer& effective() const { return effective_; }
  int kernel_size() const { return base_.kernel_h; }
  int half() const { return base_.kernel_h / 2; }

  // 1 strictly before the centre in raster order, else 0.
  bool mask(int ky, int kx) const {
    return ky < half() || (ky == half() && kx < half());
  }
  int CountCausalTaps() const;

 private:
  ConvLayer base_;
  ConvLayer effective_;
};

// "Same" zero-padded convolution. Output dims are ceil(input / stride); when
// the total padding is odd the extra row or column goes after the input.
Tensor Conv2d(const Tensor& input, const ConvLayer& layer);

// Adjoint of Conv2d with the same kernel geometry, stride and padding,
// taking `layer.in_channels` input channels. Output dims are input * stride.
Tensor TransposedConv2d(const Tensor& input, const ConvLayer& layer);

Tensor MaskedConv2d(const Tensor& input, const MaskedConvLayer& layer);

// Evaluates a 1x1 layer on one channel vector. Bit-identical to the matching
// site of Conv2d for 1x1 kernels.
void PointwiseLayer(std::span<const float> input, const ConvLayer& layer,
                    std::span<float> output);

}  // namespace mscaec

#endif  // MSCAEC_CONV_H_
