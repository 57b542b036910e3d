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

#include "mscaec/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mscaec/status.h"

namespace mscaec {
namespace {

// std::uniform_real_distribution is implementation-defined; this is not.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  double Uniform() { return (engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  uint64_t Next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

void Fill(ConvLayer& l, Rng& rng, double weight_scale, double bias_lo,
          double bias_hi) {
  for (float& w : l.weights) {
    w = static_cast<float>(rng.Uniform(-weight_scale, weight_scale));
  }
  for (float& b : l.bias) b = static_cast<float>(rng.Uniform(bias_lo, bias_hi));
}

MaskedConvLayer MaskedBranch(int kernel, int in, int out, Rng& rng) {
  ConvLayer l = MakeConvLayer(kernel, kernel, in, out);
  const int causal_taps = kernel * kernel / 2;
  Fill(l, rng, 0.5 / std::sqrt(static_cast<double>(causal_taps * in)), -0.1,
       0.1);
  return MaskedConvLayer(std::move(l));
}

double LaplaceMass(int k, double scale) {
  auto cdf = [scale](double x) {
    return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
  };
  return cdf(k + 0.5) - cdf(k - 0.5);
}

}  // namespace

ModelWeights GenerateSyntheticModel(uint64_t seed, const SyntheticDims& dims) {
  if (dims.latent_channels <= 0 || dims.hyper_channels <= 0 ||
      dims.hyper_levels < 0 || dims.z_range < 0) {
    throw ArgumentError("invalid synthetic model dims");
  }
  const int c = dims.latent_channels;
  const int each =
      dims.context_channels_each > 0 ? dims.context_channels_each : 2 * c;
  const int hidden = dims.hyper_hidden > 0 ? dims.hyper_hidden : c;
  const int features = dims.hyper_features > 0 ? dims.hyper_features : 2 * c;
  Rng rng(seed);

  ModelWeights w;
  w.latent_channels = c;
  w.hyper_channels = dims.hyper_channels;
  w.context.layer3 = MaskedBranch(3, c, each, rng);
  w.context.layer5 = MaskedBranch(5, c, each, rng);
  w.context.layer7 = MaskedBranch(7, c, each, rng);

  int in = dims.hyper_channels;
  for (int level = 0; level < dims.hyper_levels; ++level) {
    HyperLayer h{HyperLayerKind::kTransposedConv,
                 MakeConvLayer(5, 5, in, hidden, 2, Activation::kLeakyRelu)};
    Fill(h.conv, rng, 0.5 / std::sqrt(25.0 * in), -0.1, 0.1);
    w.hyper_decoder.push_back(std::move(h));
    in = hidden;
  }
  HyperLayer out{HyperLayerKind::kConv, MakeConvLayer(3, 3, in, features, 1)};
  Fill(out.conv, rng, 0.5 / std::sqrt(9.0 * in), -0.1, 0.1);
  w.hyper_decoder.push_back(std::move(out));

  const int net_in = 3 * each + features;
  const int h1 = std::max(8, (2 * net_in + 2 * c) / 3);
  const int h2 = std::max(8, (net_in + 4 * c) / 3);
  ConvLayer l0 = MakeConvLayer(1, 1, net_in, h1, 1, Activation::kLeakyRelu);
  Fill(l0, rng, 1.0 / std::sqrt(static_cast<double>(net_in)), -0.1, 0.1);
  ConvLayer l1 = MakeConvLayer(1, 1, h1, h2, 1, Activation::kLeakyRelu);
  Fill(l1, rng, 1.0 / std::sqrt(static_cast<double>(h1)), -0.1, 0.1);
  ConvLayer l2 = MakeConvLayer(1, 1, h2, 2 * c, 1);
  Fill(l2, rng, 0.3 / std::sqrt(static_cast<double>(h2)), 0.0, 0.0);
  // Means near zero, raw scales in [0, 1.5] (sigma roughly 0.7 to 1.7).
  for (int ch = 0; ch < c; ++ch) {
    l2.bias[ch] = static_cast<float>(rng.Uniform(-0.3, 0.3));
    l2.bias[c + ch] = static_cast<float>(rng.Uniform(0.0, 1.5));
  }
  w.entropy_net.layers = {std::move(l0), std::move(l1), std::move(l2)};

  for (int ch = 0; ch < dims.hyper_channels; ++ch) {
    FactorizedPmf::Channel table;
    table.z_min = -dims.z_range;
    const double scale = rng.Uniform(0.5, 2.5);
    for (int k = -dims.z_range; k <= dims.z_range; ++k) {
      table.counts.push_back(static_cast<uint32_t>(
          std::max(1.0, std::round(LaplaceMass(k, scale) * (1 << 20)))));
    }
    w.z_pmf.channels.push_back(std::move(table));
  }
  w.Validate();
  return w;
}

Tensor SyntheticLatents(uint64_t seed, const SyntheticLatentSpec& spec) {
  Tensor t(spec.height, spec.width, spec.channels);
  Rng rng(seed);
  std::vector<double> scale(spec.channels);
  for (int ch = 0; ch < spec.channels; ++ch) {
    scale[ch] = rng.Uniform() < spec.zero_channel_fraction
                    ? 0.0
                    : rng.Uniform(spec.min_scale, spec.max_scale);
  }
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      for (int ch = 0; ch < spec.channels; ++ch) {
        const double u = rng.Uniform() - 0.5;
        if (scale[ch] == 0.0) continue;
        const double mag = -scale[ch] * std::log1p(-2.0 * std::fabs(u));
        // + 0.0 turns a rounded -0 into +0.
        const double v = std::round(u < 0 ? -mag : mag) + 0.0;
        t.at(r, c, ch) = static_cast<float>(
            std::clamp(v, -static_cast<double>(spec.max_abs),
                       static_cast<double>(spec.max_abs)));
      }
    }
  }
  return t;
}

Tensor SyntheticHyperLatents(uint64_t seed, int height, int width,
                             const FactorizedPmf& pmf) {
  Tensor z(height, width, pmf.num_channels());
  Rng rng(seed);
  for (int ch = 0; ch < pmf.num_channels(); ++ch) {
    const auto& table = pmf.channels[ch];
    uint64_t total = 0;
    for (uint32_t v : table.counts) total += v;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        uint64_t pick = rng.Next() % total;
        int k = 0;
        while (pick >= table.counts[k]) pick -= table.counts[k++];
        z.at(r, c, ch) = static_cast<float>(table.z_min + k);
      }
    }
  }
  return z;
}

}  // namespace mscaec
