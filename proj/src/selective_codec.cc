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

#include "mscaec/selective_codec.h"

#include <algorithm>
#include <string>

#include "mscaec/range_coder.h"
#include "mscaec/status.h"

namespace mscaec {

ChannelFlags ChannelFlags::Compute(const Tensor& latents) {
  std::vector<bool> bits(latents.channels(), false);
  const auto data = latents.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] != 0.0f) bits[i % latents.channels()] = true;
  }
  return ChannelFlags(std::move(bits));
}

ChannelFlags ChannelFlags::AllActive(int channels) {
  return ChannelFlags(std::vector<bool>(channels, true));
}

ChannelFlags ChannelFlags::Parse(std::span<const uint8_t> bytes,
                                 int channels) {
  if (bytes.size() != static_cast<std::size_t>(SerializedSize(channels))) {
    throw ParseError("channel flags need exactly " +
                     std::to_string(SerializedSize(channels)) + " bytes, got " +
                     std::to_string(bytes.size()));
  }
  std::vector<bool> bits(channels);
  for (int i = 0; i < channels; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1;
  if (channels % 8 != 0 && (bytes.back() >> (channels % 8)) != 0) {
    throw ParseError("channel flags have non-zero padding bits");
  }
  return ChannelFlags(std::move(bits));
}

int ChannelFlags::CountActive() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), true));
}

std::vector<uint8_t> ChannelFlags::Serialize() const {
  std::vector<uint8_t> out(SerializedSize(size()), 0);
  for (int i = 0; i < size(); ++i) {
    if (bits_[i]) out[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  }
  return out;
}

std::vector<uint8_t> EncodeSites(const Tensor& latents,
                                 const ChannelFlags& active, SiteModel& model,
                                 CodingStats* stats) {
  if (active.size() != latents.channels()) {
    throw ArgumentError("flag count does not match latent channels");
  }
  RangeEncoder enc;
  std::vector<QuantizedCdf> cdfs;
  if (active.CountActive() > 0) {
    for (int r = 0; r < latents.height(); ++r) {
      for (int c = 0; c < latents.width(); ++c) {
        model.CdfsAt(latents, r, c, active, cdfs);
        const auto site = latents.Site(r, c);
        for (int ch = 0; ch < latents.channels(); ++ch) {
          if (!active[ch]) continue;
          enc.Encode(static_cast<int>(site[ch]), cdfs[ch]);
        }
      }
    }
  }
  if (stats != nullptr) {
    stats->symbols = static_cast<int64_t>(enc.pending());
    stats->quantized_bits = enc.quantized_bits();
  }
  return enc.Finish();
}

Tensor DecodeSites(std::span<const uint8_t> stream, int height, int width,
                   const ChannelFlags& active, SiteModel& model) {
  Tensor latents(height, width, active.size());
  RangeDecoder dec(stream);
  std::vector<QuantizedCdf> cdfs;
  if (active.CountActive() > 0) {
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        model.CdfsAt(latents, r, c, active, cdfs);
        auto site = latents.MutableSite(r, c);
        for (int ch = 0; ch < active.size(); ++ch) {
          if (!active[ch]) continue;
          site[ch] = static_cast<float>(dec.Decode(cdfs[ch]));
        }
      }
    }
  }
  dec.Finish();
  return latents;
}

std::vector<uint8_t> SelectiveEncode(const Tensor& latents,
                                     const ChannelFlags& flags,
                                     SiteModel& model, CodingStats* stats) {
  if (!(flags == ChannelFlags::Compute(latents))) {
    throw InternalError("channel flags disagree with latent contents");
  }
  return EncodeSites(latents, flags, model, stats);
}

Tensor SelectiveDecode(std::span<const uint8_t> stream,
                       const ChannelFlags& flags, int height, int width,
                       SiteModel& model) {
  return DecodeSites(stream, height, width, flags, model);
}

}  // namespace mscaec
