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

#include "mscaec/tensor.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "mscaec/status.h"

namespace mscaec {
namespace {

void CheckDims(int height, int width, int channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw ArgumentError("tensor dims must be positive, got " +
                        std::to_string(height) + "x" + std::to_string(width) +
                        "x" + std::to_string(channels));
  }
}

}  // namespace

Tensor::Tensor(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  CheckDims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0f);
}

Tensor::Tensor(int height, int width, int channels, std::vector<float> data)
    : height_(height),
      width_(width),
      channels_(channels),
      data_(std::move(data)) {
  CheckDims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw ArgumentError("tensor data length " + std::to_string(data_.size()) +
                        " does not match dims");
  }
  if (!AllFinite()) throw ArgumentError("tensor contains non-finite values");
}

bool Tensor::IsIntegral() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::nearbyint(v) == v; });
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

bool Tensor::operator==(const Tensor& other) const {
  return SameShape(other) &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(),
                      data_.size() * sizeof(float)) == 0);
}

Tensor ConcatChannels(const Tensor& a, const Tensor& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ConfigError("cannot concatenate tensors with different spatial dims");
  }
  Tensor out(a.height(), a.width(), a.channels() + b.channels());
  for (int r = 0; r < a.height(); ++r) {
    for (int c = 0; c < a.width(); ++c) {
      auto dst = out.MutableSite(r, c);
      auto sa = a.Site(r, c);
      auto sb = b.Site(r, c);
      std::copy(sa.begin(), sa.end(), dst.begin());
      std::copy(sb.begin(), sb.end(), dst.begin() + sa.size());
    }
  }
  return out;
}

Tensor CropSpatial(const Tensor& t, int height, int width) {
  if (height > t.height() || width > t.width()) {
    throw ConfigError("crop larger than tensor");
  }
  if (height == t.height() && width == t.width()) return t;
  Tensor out(height, width, t.channels());
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      auto src = t.Site(r, c);
      std::copy(src.begin(), src.end(), out.MutableSite(r, c).begin());
    }
  }
  return out;
}

}  // namespace mscaec
