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

// Seeded pseudo-random models and latents for testing without trained
// weights. Everything here is a pure function of its arguments. Sampling
// goes straight through the mt19937_64 engine rather than the
// implementation-defined std distributions.

#ifndef MSCAEC_SYNTHETIC_H_
#define MSCAEC_SYNTHETIC_H_

#include <cstdint>

#include "mscaec/entropy_model.h"
#include "mscaec/model_weights.h"
#include "mscaec/tensor.h"

namespace mscaec {

struct SyntheticDims {
  int latent_channels = 128;
  int hyper_channels = 192;
  // Output channels of each masked branch; 0 means 2 * latent_channels.
  int context_channels_each = 0;
  // Number of stride-2 transposed convolutions in the hyper decoder.
  int hyper_levels = 2;
  // Width of the hyper decoder's hidden layers; 0 means latent_channels.
  int hyper_hidden = 0;
  // Channels handed to the entropy network; 0 means 2 * latent_channels.
  int hyper_features = 0;
  // Hyper latent alphabet is [-z_range, z_range] in every channel.
  int z_range = 8;
};

ModelWeights GenerateSyntheticModel(uint64_t seed, const SyntheticDims& dims);

struct SyntheticLatentSpec {
  int height = 8;
  int width = 8;
  int channels = 8;
  // Probability that a channel is entirely zero.
  double zero_channel_fraction = 0.3;
  // Per-channel Laplacian scale is drawn from [min_scale, max_scale].
  double min_scale = 0.3;
  double max_scale = 3.0;
  // Values are clamped to [-max_abs, max_abs].
  int max_abs = 40;
};

// Rounded Laplacian samples with some all-zero channels.
Tensor SyntheticLatents(uint64_t seed, const SyntheticLatentSpec& spec);

// Hyper latents drawn from the factorized prior itself, so every symbol is
// inside its channel's table.
Tensor SyntheticHyperLatents(uint64_t seed, int height, int width,
                             const FactorizedPmf& pmf);

}  // namespace mscaec

#endif  // MSCAEC_SYNTHETIC_H_
