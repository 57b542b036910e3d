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

// Selective arithmetic coding of a latent tensor. One flag bit per channel
// records whether the channel holds any non-zero value; symbols are visited
// row by row, column by column, channel by channel, and channels whose flag
// is clear are skipped entirely. The decoder fills skipped channels with
// zeros.

#ifndef MSCAEC_SELECTIVE_CODEC_H_
#define MSCAEC_SELECTIVE_CODEC_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mscaec/entropy_model.h"
#include "mscaec/tensor.h"

namespace mscaec {

class ChannelFlags {
 public:
  ChannelFlags() = default;
  explicit ChannelFlags(std::vector<bool> bits) : bits_(std::move(bits)) {}

  // flag[i] = 1 iff channel i has a non-zero value.
  static ChannelFlags Compute(const Tensor& latents);
  // Every channel active; used for non-selective coding.
  static ChannelFlags AllActive(int channels);
  // Inverse of Serialize(). Throws ParseError unless the buffer has exactly
  // SerializedSize(channels) bytes and zero padding bits.
  static ChannelFlags Parse(std::span<const uint8_t> bytes, int channels);

  int size() const { return static_cast<int>(bits_.size()); }
  bool operator[](int ch) const { return bits_[ch]; }
  int CountActive() const;
  // ceil(size / 8) bytes; channel i lives in bit (i % 8) of byte i / 8.
  std::vector<uint8_t> Serialize() const;
  static int SerializedSize(int channels) { return (channels + 7) / 8; }

  bool operator==(const ChannelFlags&) const = default;

 private:
  std::vector<bool> bits_;
};

// Supplies the probability tables for one spatial site. The tensor passed in
// holds final values for every site strictly before (row, col) in raster
// order. While decoding, the remaining sites are zero.
class SiteModel {
 public:
  virtual ~SiteModel() = default;
  // Resizes `cdfs` to the channel count and fills the entry of every active
  // channel; inactive entries may be left stale.
  virtual void CdfsAt(const Tensor& latents, int row, int col,
                      const ChannelFlags& active,
                      std::vector<QuantizedCdf>& cdfs) = 0;
};

struct CodingStats {
  int64_t symbols = 0;
  // Sum of -log2 of the quantized probabilities of the coded symbols.
  double quantized_bits = 0.0;
};

// Codes every symbol of each active channel, with no consistency check
// between `active` and the tensor contents.
std::vector<uint8_t> EncodeSites(const Tensor& latents,
                                 const ChannelFlags& active, SiteModel& model,
                                 CodingStats* stats = nullptr);
Tensor DecodeSites(std::span<const uint8_t> stream, int height, int width,
                   const ChannelFlags& active, SiteModel& model);

// Selective coding. Encoding throws InternalError when `flags` disagree with
// the tensor contents.
std::vector<uint8_t> SelectiveEncode(const Tensor& latents,
                                     const ChannelFlags& flags,
                                     SiteModel& model,
                                     CodingStats* stats = nullptr);
Tensor SelectiveDecode(std::span<const uint8_t> stream,
                       const ChannelFlags& flags, int height, int width,
                       SiteModel& model);

}  // namespace mscaec

#endif  // MSCAEC_SELECTIVE_CODEC_H_
