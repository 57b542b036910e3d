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

#ifndef MSCAEC_TESTS_TEST_UTIL_H_
#define MSCAEC_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>
#include <vector>

#include "mscaec/model_weights.h"
#include "mscaec/synthetic.h"
#include "mscaec/tensor.h"

namespace mscaec::testing {

inline Tensor RandomTensor(std::mt19937_64& rng, int h, int w, int c,
                           double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(h, w, c);
  for (float& v : t.mutable_data()) v = static_cast<float>(u(rng));
  return t;
}

inline Tensor RandomIntTensor(std::mt19937_64& rng, int h, int w, int c,
                              int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  Tensor t(h, w, c);
  for (float& v : t.mutable_data()) v = static_cast<float>(u(rng));
  return t;
}

inline void Randomize(ConvLayer& l, std::mt19937_64& rng, double scale = 0.5) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (float& w : l.weights) w = static_cast<float>(u(rng));
  for (float& b : l.bias) b = static_cast<float>(u(rng));
}

// A model small enough for exhaustive tests. Two stride-2 levels, so the
// hyper grid is a quarter of the latent grid (rounded up).
inline SyntheticDims SmallDims(int latent_channels, int hyper_channels) {
  SyntheticDims d;
  d.latent_channels = latent_channels;
  d.hyper_channels = hyper_channels;
  return d;
}

struct Instance {
  ModelWeights weights;
  Tensor y;
  Tensor z;
};

inline Instance MakeInstance(uint64_t seed, int h, int w, int c, int c_z,
                             double zero_fraction = 0.3) {
  Instance in;
  in.weights = GenerateSyntheticModel(seed, SmallDims(c, c_z));
  SyntheticLatentSpec spec;
  spec.height = h;
  spec.width = w;
  spec.channels = c;
  spec.zero_channel_fraction = zero_fraction;
  in.y = SyntheticLatents(seed ^ 0x9e3779b97f4a7c15ull, spec);
  in.z = SyntheticHyperLatents(seed + 17, in.weights.HyperSizeFor(h),
                               in.weights.HyperSizeFor(w),
                               in.weights.z_pmf);
  return in;
}

}  // namespace mscaec::testing

#endif  // MSCAEC_TESTS_TEST_UTIL_H_
