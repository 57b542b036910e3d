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

// Probability side of the codec: Gaussian conditionals for the latents,
// static factorized tables for the hyper latents, and the integer CDF tables
// that the range coder consumes.

#ifndef MSCAEC_ENTROPY_MODEL_H_
#define MSCAEC_ENTROPY_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mscaec/conv.h"
#include "mscaec/tensor.h"

namespace mscaec {

inline constexpr double kSigmaMin = 0.04;
inline constexpr double kSigmaMax = 256.0;
// Likelihoods below this are clamped before taking logs in rate estimates.
inline constexpr double kLikelihoodFloor = 1e-9;

inline constexpr int kCdfPrecisionBits = 16;
inline constexpr uint32_t kCdfTotal = 1u << kCdfPrecisionBits;
// Every alphabet symbol needs a slot of width >= 1.
inline constexpr int kMaxAlphabetSize = static_cast<int>(kCdfTotal);

struct GaussianParams {
  Tensor mu;
  Tensor sigma;
};

// Stack of 1x1 layers mapping [context features | hyper features] to
// 2c outputs: the first c are means, the last c raw scales.
struct EntropyParametersNet {
  std::vector<ConvLayer> layers;

  int input_channels() const { return layers.front().in_channels; }
  int latent_channels() const { return layers.back().out_channels / 2; }
  void Validate() const;
};

// softplus followed by clamping to [kSigmaMin, kSigmaMax].
double ScaleFromRaw(double raw);

GaussianParams PredictParams(const Tensor& context, const Tensor& hyper,
                             const EntropyParametersNet& net);

// Single-site evaluation; bit-identical to the matching site of
// PredictParams. `mu` and `sigma` hold latent_channels() values.
void PredictParamsAt(std::span<const float> context,
                     std::span<const float> hyper,
                     const EntropyParametersNet& net, std::span<float> mu,
                     std::span<float> sigma);

// Standard normal CDF.
double NormalCdf(double x);

// Mass of N(mu, sigma^2) on [symbol - 1/2, symbol + 1/2].
double GaussianPmf(int symbol, double mu, double sigma);

// Integer cumulative-frequency table over [q_min, q_max] summing to
// kCdfTotal, every symbol with width >= 1.
class QuantizedCdf {
 public:
  QuantizedCdf() = default;
  // Validates the table; throws ArgumentError when malformed.
  QuantizedCdf(int q_min, std::vector<uint32_t> cumulative);

  int q_min() const { return q_min_; }
  int q_max() const { return q_min_ + size() - 1; }
  int size() const { return static_cast<int>(cumulative_.size()) - 1; }
  bool Contains(int symbol) const {
    return symbol >= q_min_ && symbol <= q_max();
  }
  uint32_t Start(int symbol) const { return cumulative_[symbol - q_min_]; }
  uint32_t Frequency(int symbol) const {
    return cumulative_[symbol - q_min_ + 1] - cumulative_[symbol - q_min_];
  }
  // Symbol whose slot [Start, Start + Frequency) contains `slot`.
  int SymbolForSlot(uint32_t slot) const;
  // -log2 of the quantized probability.
  double Bits(int symbol) const;

  std::span<const uint32_t> cumulative() const { return cumulative_; }

 private:
  int q_min_ = 0;
  std::vector<uint32_t> cumulative_;
};

// Quantizes real masses to kCdfTotal: round-to-nearest, raise zeros to 1,
// then settle the difference on the largest entry (lowest index on ties),
// stealing from successively largest entries when the sum is too high.
QuantizedCdf QuantizeMasses(int q_min, std::span<const double> masses);

// Gaussian table over [q_min, q_max] with tail mass folded into the two edge
// symbols. Throws ArgumentError for empty or oversized alphabets.
QuantizedCdf BuildCdf(double mu, double sigma, int q_min, int q_max);

// Per-channel static histogram prior for the hyper latents.
struct FactorizedPmf {
  struct Channel {
    int z_min = 0;
    // One strictly positive count per symbol in [z_min, z_min + size).
    std::vector<uint32_t> counts;

    int z_max() const { return z_min + static_cast<int>(counts.size()) - 1; }
    double Mass(int symbol) const;
  };
  std::vector<Channel> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  void Validate() const;
  // Quantized table of channel `ch`.
  QuantizedCdf Cdf(int ch) const;
};

// Sum of -log2 GaussianPmf over every element.
double RateEstimate(const Tensor& latents, const GaussianParams& params);

// Sum of -log2 p_channel(z). Throws CodingError for out-of-alphabet symbols.
double RateEstimateFactorized(const Tensor& z, const FactorizedPmf& pmf);

}  // namespace mscaec

#endif  // MSCAEC_ENTROPY_MODEL_H_
