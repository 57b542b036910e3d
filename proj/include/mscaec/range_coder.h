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

// Carry-free 64-bit range coder in the range-ANS formulation: one 64-bit
// state kept in [2^31, 2^63), renormalised 32 bits at a time, flushed as 8
// bytes. The coder is last-in first-out, so the encoder buffers (start,
// frequency) pairs and codes them in reverse when finished; the decoder then
// reads symbols in their original order, which is what an autoregressive
// decoder needs.
//
// Stream layout: 8-byte final state (little-endian) followed by the 32-bit
// renormalisation words (little-endian) in the order the decoder consumes
// them. A stream that decodes cleanly ends with the state back at its
// initial value 2^31 and every byte consumed.
//
// Size bound: with R the sum of -log2 of the quantized probabilities, the
// output is always within [ceil(R / 8), ceil(R / 8) + 8] bytes for fewer
// than about 10^5 symbols (each symbol costs at most 2^-15 / ln 2 extra
// bits).

#ifndef MSCAEC_RANGE_CODER_H_
#define MSCAEC_RANGE_CODER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mscaec/entropy_model.h"

namespace mscaec {

class RangeEncoder {
 public:
  // Throws CodingError if `symbol` lies outside the table's alphabet.
  void Encode(int symbol, const QuantizedCdf& cdf);
  std::size_t pending() const { return pending_.size(); }
  // Sum of -log2 of the quantized probabilities of every symbol so far.
  double quantized_bits() const { return quantized_bits_; }
  // Emits the stream and resets the encoder.
  std::vector<uint8_t> Finish();

 private:
  struct Slot {
    uint32_t start;
    uint32_t freq;
  };
  std::vector<Slot> pending_;
  double quantized_bits_ = 0.0;
};

class RangeDecoder {
 public:
  // Throws CodingError if the stream is shorter than the 8-byte state or the
  // state is out of range.
  explicit RangeDecoder(std::span<const uint8_t> stream);

  // Throws CodingError when the stream runs out.
  int Decode(const QuantizedCdf& cdf);
  // Verifies that the stream was consumed exactly and the state returned to
  // its initial value; throws CodingError otherwise.
  void Finish() const;
  std::size_t consumed() const { return pos_; }

 private:
  std::span<const uint8_t> stream_;
  std::size_t pos_ = 0;
  uint64_t state_ = 0;
};

}  // namespace mscaec

#endif  // MSCAEC_RANGE_CODER_H_
