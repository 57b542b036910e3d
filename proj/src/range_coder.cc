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

#include "mscaec/range_coder.h"

#include <algorithm>
#include <string>

#include "mscaec/status.h"

namespace mscaec {
namespace {

constexpr uint64_t kStateLow = uint64_t{1} << 31;
constexpr uint64_t kStateHigh = uint64_t{1} << 63;

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

}  // namespace

void RangeEncoder::Encode(int symbol, const QuantizedCdf& cdf) {
  if (!cdf.Contains(symbol)) {
    throw CodingError("symbol " + std::to_string(symbol) +
                      " outside alphabet [" + std::to_string(cdf.q_min()) +
                      ", " + std::to_string(cdf.q_max()) + "]");
  }
  pending_.push_back({cdf.Start(symbol), cdf.Frequency(symbol)});
  quantized_bits_ += cdf.Bits(symbol);
}

std::vector<uint8_t> RangeEncoder::Finish() {
  uint64_t x = kStateLow;
  std::vector<uint32_t> words;
  for (auto it = pending_.rbegin(); it != pending_.rend(); ++it) {
    const uint64_t freq = it->freq;
    const uint64_t x_max = ((kStateLow >> kCdfPrecisionBits) << 32) * freq;
    if (x >= x_max) {
      words.push_back(static_cast<uint32_t>(x));
      x >>= 32;
    }
    x = ((x / freq) << kCdfPrecisionBits) + (x % freq) + it->start;
  }
  std::vector<uint8_t> out;
  out.reserve(8 + 4 * words.size());
  PutU32(out, static_cast<uint32_t>(x));
  PutU32(out, static_cast<uint32_t>(x >> 32));
  for (auto it = words.rbegin(); it != words.rend(); ++it) PutU32(out, *it);
  pending_.clear();
  quantized_bits_ = 0.0;
  return out;
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> stream) : stream_(stream) {
  if (stream_.size() < 8) {
    throw CodingError("range coded stream shorter than its 8-byte state");
  }
  for (int i = 0; i < 8; ++i) {
    state_ |= static_cast<uint64_t>(stream_[i]) << (8 * i);
  }
  pos_ = 8;
  if (state_ < kStateLow || state_ >= kStateHigh) {
    throw CodingError("range coder state out of range");
  }
}

int RangeDecoder::Decode(const QuantizedCdf& cdf) {
  const uint32_t slot = static_cast<uint32_t>(state_ & (kCdfTotal - 1));
  const int symbol = cdf.SymbolForSlot(slot);
  const uint64_t freq = cdf.Frequency(symbol);
  state_ = freq * (state_ >> kCdfPrecisionBits) + slot - cdf.Start(symbol);
  if (state_ < kStateLow) {
    if (stream_.size() - pos_ < 4) {
      throw CodingError("range coded stream exhausted at byte " +
                        std::to_string(pos_));
    }
    uint32_t word = 0;
    for (int i = 0; i < 4; ++i) {
      word |= static_cast<uint32_t>(stream_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    state_ = (state_ << 32) | word;
  }
  return symbol;
}

void RangeDecoder::Finish() const {
  if (pos_ != stream_.size()) {
    throw CodingError("range coded stream has " +
                      std::to_string(stream_.size() - pos_) +
                      " unread bytes");
  }
  if (state_ != kStateLow) {
    throw CodingError("range coder final state mismatch (corrupt stream)");
  }
}

}  // namespace mscaec
