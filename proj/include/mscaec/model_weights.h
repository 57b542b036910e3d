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

#ifndef MSCAEC_MODEL_WEIGHTS_H_
#define MSCAEC_MODEL_WEIGHTS_H_

#include <vector>

#include "mscaec/context_model.h"
#include "mscaec/conv.h"
#include "mscaec/entropy_model.h"
#include "mscaec/tensor.h"

namespace mscaec {

inline constexpr int kWeightsFormatVersion = 1;

enum class HyperLayerKind { kConv, kTransposedConv };

struct HyperLayer {
  HyperLayerKind kind = HyperLayerKind::kConv;
  ConvLayer conv;
};

// Everything the entropy model needs at inference time.
struct ModelWeights {
  int format_version = kWeightsFormatVersion;
  int latent_channels = 0;  // c_y
  int hyper_channels = 0;   // c_z
  ContextModel context;
  EntropyParametersNet entropy_net;
  // Applied in order to the hyper latents. May be empty, in which case the
  // hyper latents feed the entropy network directly.
  std::vector<HyperLayer> hyper_decoder;
  FactorizedPmf z_pmf;

  int hyper_output_channels() const;
  // Spatial size produced by the hyper decoder for a hyper input of `size`
  // along one axis.
  int HyperOutputSize(int size) const;
  // True when `hyper_size` is the smallest hyper extent whose decoded output
  // covers `latent_size`.
  bool HyperCovers(int hyper_size, int latent_size) const;
  // The hyper extent that HyperCovers accepts for `latent_size`.
  int HyperSizeFor(int latent_size) const;

  // Throws ConfigError naming the first layer chain that does not compose.
  void Validate() const;
};

// Runs the hyper decoder on `z` and crops the result to the latent grid.
// Throws ConfigError unless z is the minimal hyper grid covering
// latent_height x latent_width.
Tensor HyperForward(const Tensor& z, const ModelWeights& weights,
                    int latent_height, int latent_width);

}  // namespace mscaec

#endif  // MSCAEC_MODEL_WEIGHTS_H_
