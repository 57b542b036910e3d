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

#include "mscaec/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "mscaec/file_formats.h"
#include "mscaec/status.h"

namespace mscaec {
namespace {

struct ScaleStats {
  double mean_cs = 0.0;
  double mean_ssim = 0.0;
};

// 'valid' separable filtering of one channel.
std::vector<double> FilterValid(const std::vector<double>& img, int h, int w,
                                const std::array<double, kSsimWindow>& taps) {
  const int oh = h - kSsimWindow + 1;
  const int ow = w - kSsimWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        s += taps[k] * img[static_cast<std::size_t>(r) * w + c + k];
      }
      tmp[static_cast<std::size_t>(r) * ow + c] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        s += taps[k] * tmp[static_cast<std::size_t>(r + k) * ow + c];
      }
      out[static_cast<std::size_t>(r) * ow + c] = s;
    }
  }
  return out;
}

ScaleStats SsimStats(const std::vector<double>& x, const std::vector<double>& y,
                     int h, int w) {
  const auto taps = SsimWindowTaps();
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = FilterValid(x, h, w, taps);
  const auto my = FilterValid(y, h, w, taps);
  const auto sxx = FilterValid(xx, h, w, taps);
  const auto syy = FilterValid(yy, h, w, taps);
  const auto sxy = FilterValid(xy, h, w, taps);
  const double c1 = kSsimK1 * kSsimK1;
  const double c2 = kSsimK2 * kSsimK2;
  double cs_sum = 0.0;
  double ssim_sum = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double var_x = sxx[i] - mx[i] * mx[i];
    const double var_y = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    const double cs = (2.0 * cov + c2) / (var_x + var_y + c2);
    const double l = (2.0 * mx[i] * my[i] + c1) /
                     (mx[i] * mx[i] + my[i] * my[i] + c1);
    cs_sum += cs;
    ssim_sum += l * cs;
  }
  return {cs_sum / mx.size(), ssim_sum / mx.size()};
}

std::vector<double> Channel(const ImagePlane& img, int ch) {
  std::vector<double> out(static_cast<std::size_t>(img.height) * img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      out[static_cast<std::size_t>(r) * img.width + c] = img.at(r, c, ch);
  return out;
}

void CheckPair(const ImagePlane& a, const ImagePlane& b) {
  a.Validate();
  b.Validate();
  if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
    throw ArgumentError("images differ in dims: " + std::to_string(a.width) +
                        "x" + std::to_string(a.height) + "x" +
                        std::to_string(a.channels) + " vs " +
                        std::to_string(b.width) + "x" +
                        std::to_string(b.height) + "x" +
                        std::to_string(b.channels));
  }
}

}  // namespace

ImagePlane ImagePlane::Zeros(int height, int width, int channels) {
  ImagePlane p;
  p.height = height;
  p.width = width;
  p.channels = channels;
  p.samples.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
  return p;
}

void ImagePlane::Validate() const {
  if (height <= 0 || width <= 0 || (channels != 1 && channels != 3)) {
    throw ArgumentError("image needs positive dims and 1 or 3 channels");
  }
  if (samples.size() != static_cast<std::size_t>(height) * width * channels) {
    throw ArgumentError("image sample count does not match dims");
  }
  for (double v : samples) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw ArgumentError("image samples must be finite and in [0, 1]");
    }
  }
}

std::array<double, kSsimWindow> SsimWindowTaps() {
  std::array<double, kSsimWindow> taps;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    taps[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

ImagePlane Downsample2x(const ImagePlane& image) {
  ImagePlane out =
      ImagePlane::Zeros(image.height / 2, image.width / 2, image.channels);
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c)
      for (int ch = 0; ch < image.channels; ++ch)
        out.at(r, c, ch) =
            (image.at(2 * r, 2 * c, ch) + image.at(2 * r, 2 * c + 1, ch) +
             image.at(2 * r + 1, 2 * c, ch) +
             image.at(2 * r + 1, 2 * c + 1, ch)) /
            4.0;
  return out;
}

double MsSsim(const ImagePlane& a, const ImagePlane& b,
              const MsSsimWeights& weights) {
  CheckPair(a, b);
  if (a.height < kMsSsimMinSide || a.width < kMsSsimMinSide) {
    throw ArgumentError("MS-SSIM needs images of at least " +
                        std::to_string(kMsSsimMinSide) + " pixels per side");
  }
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ArgumentError("MS-SSIM weights must be finite and non-negative");
    }
    weight_sum += w;
  }
  if (weight_sum <= 0.0) {
    throw ArgumentError("MS-SSIM needs at least one positive weight");
  }

  double total = 0.0;
  for (int ch = 0; ch < a.channels; ++ch) {
    ImagePlane x = ImagePlane::Zeros(a.height, a.width, 1);
    ImagePlane y = x;
    x.samples = Channel(a, ch);
    y.samples = Channel(b, ch);
    double score = 1.0;
    for (int scale = 0; scale < kMsSsimScales; ++scale) {
      const ScaleStats s = SsimStats(x.samples, y.samples, x.height, x.width);
      const double term =
          scale == kMsSsimScales - 1 ? s.mean_ssim : s.mean_cs;
      score *= std::pow(std::max(term, 0.0), weights[scale] / weight_sum);
      if (scale + 1 < kMsSsimScales) {
        x = Downsample2x(x);
        y = Downsample2x(y);
      }
    }
    total += score;
  }
  return total / a.channels;
}

double MsSsimDb(double v) {
  if (!(v < 1.0)) throw ArgumentError("MS-SSIM dB needs a value below 1");
  return -10.0 * std::log10(1.0 - v);
}

double Psnr(const ImagePlane& a, const ImagePlane& b) {
  CheckPair(a, b);
  double se = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = a.samples[i] - b.samples[i];
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(se / a.samples.size());
}

ImagePlane ParseNetpbm(std::span<const uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char* field) {
    skip_space();
    long v = 0;
    int digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) && digits < 9) {
      v = v * 10 + (bytes[pos++] - '0');
      ++digits;
    }
    if (digits == 0) {
      throw ParseError(std::string("netpbm: bad or missing ") + field);
    }
    return static_cast<int>(v);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw ParseError("netpbm: expected binary P5 or P6 magic");
  }
  const int channels = bytes[1] == '6' ? 3 : 1;
  pos = 2;
  const int width = read_int("width");
  const int height = read_int("height");
  const int maxval = read_int("maxval");
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw ParseError("netpbm: only 8-bit images with positive dims");
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw ParseError("netpbm: missing separator before raster");
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - pos < n) throw ParseError("netpbm: truncated raster");
  ImagePlane img = ImagePlane::Zeros(height, width, channels);
  for (std::size_t i = 0; i < n; ++i) {
    img.samples[i] = std::min(1.0, bytes[pos + i] / static_cast<double>(maxval));
  }
  return img;
}

std::vector<uint8_t> EncodeNetpbm(const ImagePlane& image) {
  image.Validate();
  const std::string header = std::string(image.channels == 3 ? "P6" : "P5") +
                             "\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  for (double v : image.samples) {
    out.push_back(static_cast<uint8_t>(std::lround(v * 255.0)));
  }
  return out;
}

ImagePlane ReadNetpbm(const std::filesystem::path& path) {
  return ParseNetpbm(ReadFileBytes(path));
}

}  // namespace mscaec
