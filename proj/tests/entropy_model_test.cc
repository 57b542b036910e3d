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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mscaec/status.h"
#include "test_util.h"

namespace mscaec {
namespace {

using ::mscaec::testing::RandomIntTensor;
using ::mscaec::testing::RandomTensor;
using ::mscaec::testing::Randomize;

// Composite Simpson rule over the normal density.
double IntegrateNormal(double lo, double hi, double mu, double sigma) {
  const int n = 200000;
  const double h = (hi - lo) / n;
  auto f = [&](double x) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double OraclePmf(int k, double mu, double sigma) {
  const double a = (k - 0.5 - mu) / sigma;
  const double b = (k + 0.5 - mu) / sigma;
  return 0.5 * std::erfc(-b / std::sqrt(2.0)) -
         0.5 * std::erfc(-a / std::sqrt(2.0));
}

EntropyParametersNet RandomNet(std::mt19937_64& rng, int in, int latent) {
  EntropyParametersNet net;
  net.layers.push_back(MakeConvLayer(1, 1, in, 6, 1, Activation::kLeakyRelu));
  net.layers.push_back(MakeConvLayer(1, 1, 6, 2 * latent));
  for (ConvLayer& l : net.layers) Randomize(l, rng);
  return net;
}

TEST(GaussianPmfTest, CentralMassMatchesQuadrature) {
  const double oracle = IntegrateNormal(-0.5, 0.5, 0.0, 0.5);
  EXPECT_NEAR(oracle, 0.682689, 1e-6);
  EXPECT_NEAR(GaussianPmf(0, 0.0, 0.5), oracle, 1e-6);
  EXPECT_NEAR(GaussianPmf(0, 0.0, 0.5), 0.682689492137086, 1e-12);
}

TEST(GaussianPmfTest, Symmetric) {
  for (double sigma : {0.04, 0.3, 1.0, 7.5, 200.0}) {
    for (int k = 0; k <= 20; ++k) {
      EXPECT_EQ(GaussianPmf(k, 0.0, sigma), GaussianPmf(-k, 0.0, sigma));
    }
  }
}

TEST(GaussianPmfTest, SumsToOne) {
  double s = 0.0;
  for (int k = -50; k <= 50; ++k) s += GaussianPmf(k, 0.0, 1.0);
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(GaussianPmfTest, FarTailIsPositiveAndAccurate) {
  // Naive CDF differences cancel to zero here.
  const double p = GaussianPmf(12, 0.0, 1.0);
  EXPECT_GT(p, 0.0);
  EXPECT_NEAR(p / IntegrateNormal(11.5, 12.5, 0.0, 1.0), 1.0, 1e-6);
}

TEST(ScaleFromRawTest, SoftplusAndClamp) {
  EXPECT_EQ(ScaleFromRaw(-1000.0), kSigmaMin);
  EXPECT_EQ(ScaleFromRaw(1e6), kSigmaMax);
  EXPECT_NEAR(ScaleFromRaw(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(ScaleFromRaw(3.0), std::log1p(std::exp(3.0)), 1e-14);
}

TEST(PredictParamsTest, BiasOnlyNetwork) {
  EntropyParametersNet net;
  net.layers.push_back(MakeConvLayer(1, 1, 5, 4));
  net.layers[0].bias = {0.5f, -2.0f, 0.3f, -1000.0f};
  const GaussianParams p = PredictParams(Tensor(3, 2, 3), Tensor(3, 2, 2), net);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 2; ++c) {
      EXPECT_EQ(p.mu.at(r, c, 0), 0.5f);
      EXPECT_EQ(p.mu.at(r, c, 1), -2.0f);
      EXPECT_EQ(p.sigma.at(r, c, 0),
                static_cast<float>(ScaleFromRaw(0.3f)));
      EXPECT_EQ(p.sigma.at(r, c, 1), static_cast<float>(kSigmaMin));
    }
  }
}

TEST(PredictParamsTest, SiteMatchesFullTensor) {
  std::mt19937_64 rng(1);
  const EntropyParametersNet net = RandomNet(rng, 7, 3);
  const Tensor ctx = RandomTensor(rng, 4, 5, 4);
  const Tensor hyper = RandomTensor(rng, 4, 5, 3);
  const GaussianParams full = PredictParams(ctx, hyper, net);
  std::vector<float> mu(3), sigma(3);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 5; ++c) {
      PredictParamsAt(ctx.Site(r, c), hyper.Site(r, c), net, mu, sigma);
      for (int ch = 0; ch < 3; ++ch) {
        ASSERT_EQ(mu[ch], full.mu.at(r, c, ch));
        ASSERT_EQ(sigma[ch], full.sigma.at(r, c, ch));
      }
    }
  }
}

TEST(PredictParamsTest, WrongInputWidthThrows) {
  std::mt19937_64 rng(2);
  const EntropyParametersNet net = RandomNet(rng, 7, 3);
  EXPECT_THROW(PredictParams(Tensor(2, 2, 4), Tensor(2, 2, 2), net),
               ConfigError);
}

TEST(BuildCdfTest, SingleSymbol) {
  const QuantizedCdf cdf = BuildCdf(3.0, 1.0, 5, 5);
  ASSERT_EQ(cdf.cumulative().size(), 2u);
  EXPECT_EQ(cdf.cumulative()[0], 0u);
  EXPECT_EQ(cdf.cumulative()[1], kCdfTotal);
}

TEST(BuildCdfTest, NarrowGaussianConcentratesMass) {
  const QuantizedCdf cdf = BuildCdf(0.0, kSigmaMin, -8, 8);
  EXPECT_GE(cdf.Frequency(0), kCdfTotal - 32);
  for (int s = -8; s <= 8; ++s) EXPECT_GE(cdf.Frequency(s), 1u);
  EXPECT_EQ(cdf.cumulative().back(), kCdfTotal);
}

TEST(BuildCdfTest, EveryWidthNonZeroOnRandomParams) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mu_dist(-60.0, 60.0);
  std::uniform_real_distribution<double> log_sigma(std::log(kSigmaMin),
                                                   std::log(kSigmaMax));
  std::uniform_int_distribution<int> lo_dist(-40, 0), width(0, 80);
  for (int trial = 0; trial < 20000; ++trial) {
    const int lo = lo_dist(rng);
    const QuantizedCdf cdf = BuildCdf(mu_dist(rng), std::exp(log_sigma(rng)),
                                      lo, lo + width(rng));
    const auto cum = cdf.cumulative();
    ASSERT_EQ(cum.front(), 0u);
    ASSERT_EQ(cum.back(), kCdfTotal);
    for (std::size_t i = 1; i < cum.size(); ++i) ASSERT_GT(cum[i], cum[i - 1]);
  }
}

TEST(BuildCdfTest, TailsFoldIntoEdgeSymbols) {
  // Mean far outside the alphabet: the nearest edge takes nearly all mass.
  const QuantizedCdf cdf = BuildCdf(100.0, 1.0, -3, 3);
  EXPECT_EQ(cdf.Frequency(3), kCdfTotal - 6);
}

TEST(BuildCdfTest, RejectsOversizedAlphabet) {
  EXPECT_THROW(BuildCdf(0.0, 1.0, 0, kMaxAlphabetSize), ArgumentError);
}

TEST(QuantizeMassesTest, ExactTotalAndRounding) {
  const std::vector<double> m = {0.5, 0.25, 0.25};
  const QuantizedCdf cdf = QuantizeMasses(-1, m);
  EXPECT_EQ(cdf.Frequency(-1), 32768u);
  EXPECT_EQ(cdf.Frequency(0), 16384u);
  EXPECT_EQ(cdf.Frequency(1), 16384u);
  EXPECT_EQ(cdf.SymbolForSlot(0), -1);
  EXPECT_EQ(cdf.SymbolForSlot(32767), -1);
  EXPECT_EQ(cdf.SymbolForSlot(32768), 0);
  EXPECT_EQ(cdf.SymbolForSlot(65535), 1);
  EXPECT_DOUBLE_EQ(cdf.Bits(-1), 1.0);
}

TEST(QuantizeMassesTest, ZeroMassesGetOneSlot) {
  const std::vector<double> m = {0.0, 1.0, 0.0, 0.0};
  const QuantizedCdf cdf = QuantizeMasses(0, m);
  EXPECT_EQ(cdf.Frequency(0), 1u);
  EXPECT_EQ(cdf.Frequency(1), kCdfTotal - 3);
}

TEST(QuantizeMassesTest, RejectsNegativeMass) {
  const std::vector<double> m = {-0.1, 1.1};
  EXPECT_THROW(QuantizeMasses(0, m), ArgumentError);
}

TEST(RateEstimateTest, HalfProbabilityIsOneBit) {
  GaussianParams p{Tensor(1, 1, 1, {0.5f}), Tensor(1, 1, 1, {0.04f})};
  EXPECT_NEAR(RateEstimate(Tensor(1, 1, 1), p), 1.0, 1e-12);
}

TEST(RateEstimateTest, TenQuarterSymbolsAreTwentyBits) {
  // sigma chosen so that P(0 <= x - mu < 1) = 1/4 with mu = -0.5.
  const float sigma = static_cast<float>(1.0 / 0.6744897501960817);
  GaussianParams p{Tensor(2, 5, 1, std::vector<float>(10, -0.5f)),
                   Tensor(2, 5, 1, std::vector<float>(10, sigma))};
  EXPECT_NEAR(RateEstimate(Tensor(2, 5, 1), p), 20.0, 1e-6);
}

TEST(RateEstimateTest, MatchesScalarLoop) {
  std::mt19937_64 rng(4);
  const Tensor y = RandomIntTensor(rng, 8, 8, 4, -6, 6);
  GaussianParams p{RandomTensor(rng, 8, 8, 4, -3, 3),
                   RandomTensor(rng, 8, 8, 4, 0.1, 4.0)};
  double oracle = 0.0;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      for (int ch = 0; ch < 4; ++ch) {
        const double q = OraclePmf(static_cast<int>(y.at(r, c, ch)),
                                   p.mu.at(r, c, ch), p.sigma.at(r, c, ch));
        oracle += -std::log2(std::max(q, 1e-9));
      }
  EXPECT_NEAR(RateEstimate(y, p), oracle, 1e-9 * oracle);
}

FactorizedPmf Uniform4(int channels) {
  FactorizedPmf pmf;
  for (int ch = 0; ch < channels; ++ch) pmf.channels.push_back({-1, {5, 5, 5, 5}});
  return pmf;
}

TEST(RateEstimateFactorizedTest, UniformFourSymbols) {
  Tensor z(2, 4, 1, {-1, 0, 1, 2, 2, 1, 0, -1});
  EXPECT_DOUBLE_EQ(RateEstimateFactorized(z, Uniform4(1)), 16.0);
}

TEST(RateEstimateFactorizedTest, SingleSymbolIsFree) {
  FactorizedPmf pmf;
  pmf.channels.push_back({3, {17}});
  EXPECT_EQ(RateEstimateFactorized(Tensor(3, 3, 1, std::vector<float>(9, 3.0f)), pmf),
            0.0);
}

TEST(RateEstimateFactorizedTest, MatchesScalarLoop) {
  std::mt19937_64 rng(5);
  FactorizedPmf pmf;
  std::uniform_int_distribution<uint32_t> count(1, 1000);
  for (int ch = 0; ch < 3; ++ch) {
    FactorizedPmf::Channel t{-4 + ch, {}};
    for (int i = 0; i < 9; ++i) t.counts.push_back(count(rng));
    pmf.channels.push_back(t);
  }
  Tensor z(4, 4, 3);
  std::uniform_int_distribution<int> sym(0, 8);
  double oracle = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int ch = 0; ch < 3; ++ch) {
        const int k = sym(rng);
        z.at(r, c, ch) = static_cast<float>(pmf.channels[ch].z_min + k);
        double total = 0.0;
        for (uint32_t v : pmf.channels[ch].counts) total += v;
        oracle -= std::log2(pmf.channels[ch].counts[k] / total);
      }
  EXPECT_NEAR(RateEstimateFactorized(z, pmf), oracle, 1e-9 * oracle);
}

TEST(RateEstimateFactorizedTest, OutOfAlphabetThrows) {
  EXPECT_THROW(RateEstimateFactorized(Tensor(1, 1, 1, {7.0f}), Uniform4(1)),
               CodingError);
}

TEST(FactorizedPmfTest, ValidateRejectsZeroCounts) {
  FactorizedPmf pmf;
  pmf.channels.push_back({0, {3, 0, 1}});
  EXPECT_THROW(pmf.Validate(), ConfigError);
}

}  // namespace
}  // namespace mscaec
