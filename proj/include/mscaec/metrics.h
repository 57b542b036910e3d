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

// Image quality metrics: MS-SSIM with configurable per-scale weights, its dB
// form, and PSNR. Samples are unit range.

#ifndef MSCAEC_METRICS_H_
#define MSCAEC_METRICS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mscaec {

struct ImagePlane {
  int height = 0;
  int width = 0;
  int channels = 1;  // 1 or 3
  // Row-major, channels innermost, values in [0, 1].
  std::vector<double> samples;

  double at(int row, int col, int ch) const {
    return samples[(static_cast<std::size_t>(row) * width + col) * channels +
                   ch];
  }
  double& at(int row, int col, int ch) {
    return samples[(static_cast<std::size_t>(row) * width + col) * channels +
                   ch];
  }
  static ImagePlane Zeros(int height, int width, int channels);
  // Throws ArgumentError unless dims, channel count and samples are valid.
  void Validate() const;
};

using MsSsimWeights = std::array<double, 5>;

inline constexpr MsSsimWeights kDefaultMsSsimWeights = {
    0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
inline constexpr MsSsimWeights kAverageMsSsimWeights = {1.0, 1.0, 1.0, 1.0,
                                                        1.0};

inline constexpr int kMsSsimScales = 5;
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;
// Five dyadic scales must still fit the 11-tap window.
inline constexpr int kMsSsimMinSide = 176;

// Normalised 1-D Gaussian taps of the SSIM window.
std::array<double, kSsimWindow> SsimWindowTaps();

// 2x2 mean pooling; odd trailing rows and columns are dropped.
ImagePlane Downsample2x(const ImagePlane& image);

// Multi-scale SSIM. Scales 1-4 contribute their mean contrast-structure
// term, scale 5 its mean SSIM (luminance times contrast-structure); each is
// clamped at zero and raised to its weight divided by the weight sum. Colour
// images are scored per channel and averaged. Throws ArgumentError for
// mismatched or undersized images and invalid weights.
double MsSsim(const ImagePlane& a, const ImagePlane& b,
              const MsSsimWeights& weights = kDefaultMsSsimWeights);

// -10 log10(1 - v). Throws ArgumentError for v >= 1.
double MsSsimDb(double v);

// -10 log10(MSE); +infinity for identical images.
double Psnr(const ImagePlane& a, const ImagePlane& b);

// Binary 8-bit PGM (P5) and PPM (P6).
ImagePlane ParseNetpbm(std::span<const uint8_t> bytes);
std::vector<uint8_t> EncodeNetpbm(const ImagePlane& image);
ImagePlane ReadNetpbm(const std::filesystem::path& path);

}  // namespace mscaec

#endif  // MSCAEC_METRICS_H_
