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

// A second MS-SSIM written straight from the definition: full 2-D window
// sums and two-pass (centred) moments, no separable filtering.

#ifndef MSCAEC_TESTS_METRICS_ORACLE_H_
#define MSCAEC_TESTS_METRICS_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "mscaec/metrics.h"

namespace mscaec::testing {

// Smooth gradient plus texture, and a noisy copy of it.
inline std::pair<ImagePlane, ImagePlane> NoisyPair(uint64_t seed, int h, int w,
                                                   int channels) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.06);
  std::uniform_real_distribution<double> phase(0.0, 6.0);
  ImagePlane a = ImagePlane::Zeros(h, w, channels);
  ImagePlane b = a;
  for (int ch = 0; ch < channels; ++ch) {
    const double p = phase(rng);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double base = 0.5 + 0.25 * std::sin(0.05 * r + p) *
                                      std::cos(0.07 * c - p) +
                            0.1 * noise(rng);
        a.at(r, c, ch) = std::clamp(base, 0.0, 1.0);
        b.at(r, c, ch) = std::clamp(base + noise(rng), 0.0, 1.0);
      }
    }
  }
  return {a, b};
}

inline std::vector<std::vector<double>> OracleChannel(const ImagePlane& p,
                                                      int ch) {
  std::vector<std::vector<double>> m(p.height, std::vector<double>(p.width));
  for (int r = 0; r < p.height; ++r)
    for (int c = 0; c < p.width; ++c) m[r][c] = p.at(r, c, ch);
  return m;
}

inline std::vector<std::vector<double>> OracleHalve(
    const std::vector<std::vector<double>>& m) {
  const std::size_t h = m.size() / 2, w = m[0].size() / 2;
  std::vector<std::vector<double>> out(h, std::vector<double>(w));
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      out[r][c] = 0.25 * (m[2 * r][2 * c] + m[2 * r][2 * c + 1] +
                          m[2 * r + 1][2 * c] + m[2 * r + 1][2 * c + 1]);
  return out;
}

// Returns {mean cs, mean ssim} over all valid window positions.
inline std::pair<double, double> OracleScale(
    const std::vector<std::vector<double>>& x,
    const std::vector<std::vector<double>>& y) {
  double g[11][11];
  double gsum = 0.0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / 4.5);
      gsum += g[i][j];
    }
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const int h = static_cast<int>(x.size()), w = static_cast<int>(x[0].size());
  double cs_total = 0.0, ssim_total = 0.0;
  int n = 0;
  for (int r = 0; r + 11 <= h; ++r) {
    for (int c = 0; c + 11 <= w; ++c) {
      double mx = 0.0, my = 0.0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          mx += g[i][j] / gsum * x[r + i][c + j];
          my += g[i][j] / gsum * y[r + i][c + j];
        }
      double vx = 0.0, vy = 0.0, cov = 0.0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          const double dx = x[r + i][c + j] - mx, dy = y[r + i][c + j] - my;
          vx += g[i][j] / gsum * dx * dx;
          vy += g[i][j] / gsum * dy * dy;
          cov += g[i][j] / gsum * dx * dy;
        }
      const double cs = (2 * cov + c2) / (vx + vy + c2);
      const double l = (2 * mx * my + c1) / (mx * mx + my * my + c1);
      cs_total += cs;
      ssim_total += l * cs;
      ++n;
    }
  }
  return {cs_total / n, ssim_total / n};
}

inline double DirectMsSsim(const ImagePlane& a, const ImagePlane& b,
                           const MsSsimWeights& weights) {
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  double total = 0.0;
  for (int ch = 0; ch < a.channels; ++ch) {
    auto x = OracleChannel(a, ch);
    auto y = OracleChannel(b, ch);
    double score = 1.0;
    for (int s = 0; s < 5; ++s) {
      const auto [cs, ssim] = OracleScale(x, y);
      const double term = s == 4 ? ssim : cs;
      score *= std::pow(std::max(term, 0.0), weights[s] / wsum);
      x = OracleHalve(x);
      y = OracleHalve(y);
    }
    total += score;
  }
  return total / a.channels;
}

}  // namespace mscaec::testing

#endif  // MSCAEC_TESTS_METRICS_ORACLE_H_
