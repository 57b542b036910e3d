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

#ifndef MSCAEC_TENSOR_H_
#define MSCAEC_TENSOR_H_

#include <cstddef>
#include <span>
#include <vector>

namespace mscaec {

// Dense height x width x channels array of single-precision values stored
// row-major with channels innermost. Latents, hyper latents, Gaussian
// parameter maps and intermediate feature maps all use this type.
class Tensor {
 public:
  Tensor() = default;
  // Zero-filled tensor.
  Tensor(int height, int width, int channels);
  // Takes ownership of `data`; its length must be height * width * channels
  // and every value must be finite.
  Tensor(int height, int width, int channels, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t Index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ +
           channel;
  }
  float at(int row, int col, int channel) const {
    return data_[Index(row, col, channel)];
  }
  float& at(int row, int col, int channel) {
    return data_[Index(row, col, channel)];
  }

  // All channels of one spatial site.
  std::span<const float> Site(int row, int col) const {
    return {data_.data() + Index(row, col, 0),
            static_cast<std::size_t>(channels_)};
  }
  std::span<float> MutableSite(int row, int col) {
    return {data_.data() + Index(row, col, 0),
            static_cast<std::size_t>(channels_)};
  }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  bool SameShape(const Tensor& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }
  // True when every value is an integer.
  bool IsIntegral() const;
  bool AllFinite() const;

  // Bitwise equality of shape and contents.
  bool operator==(const Tensor& other) const;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Channel-wise concatenation of two tensors with equal spatial dims.
Tensor ConcatChannels(const Tensor& a, const Tensor& b);

// Top-left spatial crop.
Tensor CropSpatial(const Tensor& t, int height, int width);

}  // namespace mscaec

#endif  // MSCAEC_TENSOR_H_
