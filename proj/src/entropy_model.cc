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

#include "mscaec/entropy_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mscaec/status.h"

namespace mscaec {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Upper tail 1 - Phi(x), accurate for large positive x.
double NormalTail(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

// Phi(b) - Phi(a) for a <= b, evaluated on whichever tail keeps precision.
double NormalMass(double a, double b) {
  if (a >= 0.0) return NormalTail(a) - NormalTail(b);
  if (b <= 0.0) return NormalTail(-b) - NormalTail(-a);
  return 1.0 - NormalTail(b) - NormalTail(-a);
}

void CheckSite(std::span<const float> values, int expected, const char* what) {
  if (values.size() != static_cast<std::size_t>(expected)) {
    throw ConfigError(std::string(what) + " has " +
                      std::to_string(values.size()) + " channels, expected " +
                      std::to_string(expected));
  }
}

}  // namespace

void EntropyParametersNet::Validate() const {
  if (layers.empty()) throw ConfigError("entropy parameters net has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const ConvLayer& l = layers[i];
    l.Validate();
    if (l.kernel_h != 1 || l.kernel_w != 1 || l.stride != 1) {
      throw ConfigError("entropy parameters layer " + std::to_string(i) +
                        " must be 1x1 with stride 1");
    }
    if (i > 0 && l.in_channels != layers[i - 1].out_channels) {
      throw ConfigError("entropy parameters layer " + std::to_string(i) +
                        " input does not match previous output");
    }
  }
  if (layers.back().out_channels % 2 != 0) {
    throw ConfigError("entropy parameters output must have 2c channels");
  }
}

double ScaleFromRaw(double raw) {
  const double softplus = raw > 0.0 ? raw + std::log1p(std::exp(-raw))
                                    : std::log1p(std::exp(raw));
  return std::clamp(softplus, kSigmaMin, kSigmaMax);
}

GaussianParams PredictParams(const Tensor& context, const Tensor& hyper,
                             const EntropyParametersNet& net) {
  Tensor x = ConcatChannels(context, hyper);
  if (x.channels() != net.input_channels()) {
    throw ConfigError("entropy parameters net expects " +
                      std::to_string(net.input_channels()) +
                      " input channels, got " + std::to_string(x.channels()));
  }
  for (const ConvLayer& layer : net.layers) x = Conv2d(x, layer);
  const int c = net.latent_channels();
  GaussianParams p{Tensor(x.height(), x.width(), c),
                   Tensor(x.height(), x.width(), c)};
  for (int r = 0; r < x.height(); ++r) {
    for (int col = 0; col < x.width(); ++col) {
      const auto raw = x.Site(r, col);
      auto mu = p.mu.MutableSite(r, col);
      auto sigma = p.sigma.MutableSite(r, col);
      for (int ch = 0; ch < c; ++ch) {
        mu[ch] = raw[ch];
        sigma[ch] = static_cast<float>(ScaleFromRaw(raw[c + ch]));
      }
    }
  }
  return p;
}

void PredictParamsAt(std::span<const float> context,
                     std::span<const float> hyper,
                     const EntropyParametersNet& net, std::span<float> mu,
                     std::span<float> sigma) {
  const int c = net.latent_channels();
  CheckSite(mu, c, "mu output");
  CheckSite(sigma, c, "sigma output");
  std::vector<float> x(context.size() + hyper.size());
  CheckSite(x, net.input_channels(), "entropy parameters input");
  std::copy(context.begin(), context.end(), x.begin());
  std::copy(hyper.begin(), hyper.end(), x.begin() + context.size());
  std::vector<float> y;
  for (const ConvLayer& layer : net.layers) {
    y.resize(layer.out_channels);
    PointwiseLayer(x, layer, y);
    x.swap(y);
  }
  for (int ch = 0; ch < c; ++ch) {
    mu[ch] = x[ch];
    sigma[ch] = static_cast<float>(ScaleFromRaw(x[c + ch]));
  }
}

double NormalCdf(double x) { return NormalTail(-x); }

double GaussianPmf(int symbol, double mu, double sigma) {
  const double a = (symbol - 0.5 - mu) / sigma;
  const double b = (symbol + 0.5 - mu) / sigma;
  return NormalMass(a, b);
}

QuantizedCdf::QuantizedCdf(int q_min, std::vector<uint32_t> cumulative)
    : q_min_(q_min), cumulative_(std::move(cumulative)) {
  if (cumulative_.size() < 2) throw ArgumentError("empty CDF table");
  if (cumulative_.front() != 0 || cumulative_.back() != kCdfTotal) {
    throw ArgumentError("CDF table must run from 0 to 2^16");
  }
  for (std::size_t i = 1; i < cumulative_.size(); ++i) {
    if (cumulative_[i] <= cumulative_[i - 1]) {
      throw ArgumentError("CDF table has a zero-width symbol at index " +
                          std::to_string(i - 1));
    }
  }
}

int QuantizedCdf::SymbolForSlot(uint32_t slot) const {
  // First cumulative entry strictly greater than slot, minus one.
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), slot);
  return q_min_ + static_cast<int>(it - cumulative_.begin()) - 1;
}

double QuantizedCdf::Bits(int symbol) const {
  return kCdfPrecisionBits - std::log2(static_cast<double>(Frequency(symbol)));
}

QuantizedCdf QuantizeMasses(int q_min, std::span<const double> masses) {
  const std::size_t n = masses.size();
  if (n == 0) throw ArgumentError("empty alphabet");
  if (n > static_cast<std::size_t>(kMaxAlphabetSize)) {
    throw ArgumentError("alphabet of " + std::to_string(n) +
                        " symbols exceeds the 2^16 table precision");
  }
  std::vector<int64_t> freq(n);
  int64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = masses[i];
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ArgumentError("masses must be finite and non-negative");
    }
    freq[i] = std::max<int64_t>(
        1, static_cast<int64_t>(std::floor(m * kCdfTotal + 0.5)));
    sum += freq[i];
  }
  int64_t diff = static_cast<int64_t>(kCdfTotal) - sum;
  if (diff > 0) {
    const auto largest = std::max_element(freq.begin(), freq.end());
    *largest += diff;
  }
  while (diff < 0) {
    const auto largest = std::max_element(freq.begin(), freq.end());
    const int64_t take = std::min(-diff, *largest - 1);
    *largest -= take;
    diff += take;
  }
  std::vector<uint32_t> cumulative(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative[i + 1] = cumulative[i] + static_cast<uint32_t>(freq[i]);
  }
  return QuantizedCdf(q_min, std::move(cumulative));
}

QuantizedCdf BuildCdf(double mu, double sigma, int q_min, int q_max) {
  if (q_max < q_min) throw ArgumentError("empty CDF alphabet");
  const int64_t n = static_cast<int64_t>(q_max) - q_min + 1;
  if (n > kMaxAlphabetSize) {
    throw ArgumentError("alphabet [" + std::to_string(q_min) + ", " +
                        std::to_string(q_max) + "] is wider than 2^16");
  }
  std::vector<double> masses(n);
  if (n == 1) {
    masses[0] = 1.0;
  } else {
    for (int64_t i = 0; i < n; ++i) {
      const int s = q_min + static_cast<int>(i);
      const double a = (s - 0.5 - mu) / sigma;
      const double b = (s + 0.5 - mu) / sigma;
      if (i == 0) {
        masses[i] = NormalTail(-b);
      } else if (i == n - 1) {
        masses[i] = NormalTail(a);
      } else {
        masses[i] = NormalMass(a, b);
      }
    }
  }
  return QuantizeMasses(q_min, masses);
}

double FactorizedPmf::Channel::Mass(int symbol) const {
  const double total =
      std::accumulate(counts.begin(), counts.end(), 0.0,
                      [](double acc, uint32_t v) { return acc + v; });
  return counts[symbol - z_min] / total;
}

void FactorizedPmf::Validate() const {
  if (channels.empty()) throw ConfigError("factorized prior has no channels");
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    const Channel& c = channels[ch];
    if (c.counts.empty() ||
        c.counts.size() > static_cast<std::size_t>(kMaxAlphabetSize)) {
      throw ConfigError("factorized prior channel " + std::to_string(ch) +
                        " has an invalid alphabet size");
    }
    if (std::find(c.counts.begin(), c.counts.end(), 0u) != c.counts.end()) {
      throw ConfigError("factorized prior channel " + std::to_string(ch) +
                        " has a zero count");
    }
  }
}

QuantizedCdf FactorizedPmf::Cdf(int ch) const {
  const Channel& c = channels.at(ch);
  const double total =
      std::accumulate(c.counts.begin(), c.counts.end(), 0.0,
                      [](double acc, uint32_t v) { return acc + v; });
  std::vector<double> masses(c.counts.size());
  for (std::size_t i = 0; i < masses.size(); ++i) {
    masses[i] = c.counts[i] / total;
  }
  return QuantizeMasses(c.z_min, masses);
}

double RateEstimate(const Tensor& latents, const GaussianParams& params) {
  if (!latents.SameShape(params.mu) || !latents.SameShape(params.sigma)) {
    throw ArgumentError("latents and Gaussian parameters differ in shape");
  }
  const auto y = latents.data();
  const auto mu = params.mu.data();
  const auto sigma = params.sigma.data();
  double bits = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = GaussianPmf(static_cast<int>(y[i]), mu[i], sigma[i]);
    bits -= std::log2(std::max(p, kLikelihoodFloor));
  }
  return bits;
}

double RateEstimateFactorized(const Tensor& z, const FactorizedPmf& pmf) {
  if (z.channels() != pmf.num_channels()) {
    throw ArgumentError("hyper latents and factorized prior differ in channels");
  }
  std::vector<double> totals(pmf.num_channels());
  for (int ch = 0; ch < pmf.num_channels(); ++ch) {
    const auto& counts = pmf.channels[ch].counts;
    totals[ch] = std::accumulate(counts.begin(), counts.end(), 0.0,
                                 [](double acc, uint32_t v) { return acc + v; });
  }
  double bits = 0.0;
  for (int r = 0; r < z.height(); ++r) {
    for (int c = 0; c < z.width(); ++c) {
      for (int ch = 0; ch < z.channels(); ++ch) {
        const auto& table = pmf.channels[ch];
        const int s = static_cast<int>(z.at(r, c, ch));
        if (s < table.z_min || s > table.z_max()) {
          throw CodingError("hyper latent " + std::to_string(s) +
                            " outside channel " + std::to_string(ch) +
                            " alphabet");
        }
        bits -= std::log2(table.counts[s - table.z_min] / totals[ch]);
      }
    }
  }
  return bits;
}

}  // namespace mscaec
