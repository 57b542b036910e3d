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

#include "mscaec/model_weights.h"

#include <string>

#include "mscaec/status.h"

namespace mscaec {

int ModelWeights::hyper_output_channels() const {
  return hyper_decoder.empty() ? hyper_channels
                               : hyper_decoder.back().conv.out_channels;
}

int ModelWeights::HyperOutputSize(int size) const {
  for (const HyperLayer& l : hyper_decoder) {
    if (l.kind == HyperLayerKind::kTransposedConv) {
      size *= l.conv.stride;
    } else {
      size = (size + l.conv.stride - 1) / l.conv.stride;
    }
  }
  return size;
}

bool ModelWeights::HyperCovers(int hyper_size, int latent_size) const {
  return hyper_size >= 1 && HyperOutputSize(hyper_size) >= latent_size &&
         (hyper_size == 1 || HyperOutputSize(hyper_size - 1) < latent_size);
}

int ModelWeights::HyperSizeFor(int latent_size) const {
  int size = 1;
  while (HyperOutputSize(size) < latent_size) ++size;
  return size;
}

void ModelWeights::Validate() const {
  if (format_version != kWeightsFormatVersion) {
    throw ConfigError("unsupported weights format_version " +
                      std::to_string(format_version));
  }
  if (latent_channels <= 0 || hyper_channels <= 0) {
    throw ConfigError("latent and hyper channel counts must be positive");
  }
  context.Validate();
  if (context.in_channels() != latent_channels) {
    throw ConfigError("context model input channels " +
                      std::to_string(context.in_channels()) +
                      " != latent_channels " +
                      std::to_string(latent_channels));
  }
  int channels = hyper_channels;
  for (std::size_t i = 0; i < hyper_decoder.size(); ++i) {
    const ConvLayer& l = hyper_decoder[i].conv;
    l.Validate();
    if (l.in_channels != channels) {
      throw ConfigError("hyper decoder layer " + std::to_string(i) +
                        " expects " + std::to_string(l.in_channels) +
                        " channels, previous stage gives " +
                        std::to_string(channels));
    }
    channels = l.out_channels;
  }
  entropy_net.Validate();
  if (entropy_net.latent_channels() != latent_channels) {
    throw ConfigError("entropy parameters net predicts " +
                      std::to_string(entropy_net.latent_channels()) +
                      " channels, latent_channels is " +
                      std::to_string(latent_channels));
  }
  if (entropy_net.input_channels() !=
      context.out_channels() + hyper_output_channels()) {
    throw ConfigError(
        "entropy parameters input " +
        std::to_string(entropy_net.input_channels()) +
        " != context channels " + std::to_string(context.out_channels()) +
        " + hyper decoder channels " +
        std::to_string(hyper_output_channels()));
  }
  z_pmf.Validate();
  if (z_pmf.num_channels() != hyper_channels) {
    throw ConfigError("factorized prior has " +
                      std::to_string(z_pmf.num_channels()) +
                      " channels, hyper_channels is " +
                      std::to_string(hyper_channels));
  }
}

Tensor HyperForward(const Tensor& z, const ModelWeights& weights,
                    int latent_height, int latent_width) {
  if (z.channels() != weights.hyper_channels) {
    throw ConfigError("hyper latents have " + std::to_string(z.channels()) +
                      " channels, model expects " +
                      std::to_string(weights.hyper_channels));
  }
  if (!weights.HyperCovers(z.height(), latent_height) ||
      !weights.HyperCovers(z.width(), latent_width)) {
    throw ConfigError("hyper grid " + std::to_string(z.height()) + "x" +
                      std::to_string(z.width()) +
                      " does not match latent grid " +
                      std::to_string(latent_height) + "x" +
                      std::to_string(latent_width));
  }
  Tensor x = z;
  for (const HyperLayer& l : weights.hyper_decoder) {
    x = l.kind == HyperLayerKind::kTransposedConv ? TransposedConv2d(x, l.conv)
                                                  : Conv2d(x, l.conv);
  }
  return CropSpatial(x, latent_height, latent_width);
}

}  // namespace mscaec
