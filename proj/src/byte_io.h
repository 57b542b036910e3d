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

// Little-endian byte packing shared by the file formats. Internal header.

#ifndef MSCAEC_SRC_BYTE_IO_H_
#define MSCAEC_SRC_BYTE_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mscaec/status.h"

namespace mscaec::internal {

class ByteWriter {
 public:
  void Bytes(std::span<const uint8_t> b) {
    out_.insert(out_.end(), b.begin(), b.end());
  }
  void Text(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void U8(uint8_t v) { out_.push_back(v); }
  void U16(uint16_t v) { Little(v, 2); }
  void U32(uint32_t v) { Little(v, 4); }
  void U64(uint64_t v) { Little(v, 8); }
  void I32(int32_t v) { U32(static_cast<uint32_t>(v)); }
  void F32(float v) { U32(std::bit_cast<uint32_t>(v)); }

  std::vector<uint8_t>& bytes() { return out_; }

 private:
  void Little(uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  std::vector<uint8_t> out_;
};

// Reads fields in order, throwing ParseError that names the field being read
// when the input runs short.
class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> in, std::string context)
      : in_(in), context_(std::move(context)) {}

  std::span<const uint8_t> Bytes(std::size_t n, std::string_view field) {
    Need(n, field);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::string Text(std::size_t n, std::string_view field) {
    auto s = Bytes(n, field);
    return std::string(s.begin(), s.end());
  }
  uint8_t U8(std::string_view field) { return static_cast<uint8_t>(Little(1, field)); }
  uint16_t U16(std::string_view field) { return static_cast<uint16_t>(Little(2, field)); }
  uint32_t U32(std::string_view field) { return static_cast<uint32_t>(Little(4, field)); }
  uint64_t U64(std::string_view field) { return Little(8, field); }
  int32_t I32(std::string_view field) { return static_cast<int32_t>(U32(field)); }
  float F32(std::string_view field) { return std::bit_cast<float>(U32(field)); }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }
  [[noreturn]] void Fail(std::string_view message) const {
    throw ParseError(context_ + ": " + std::string(message));
  }

 private:
  void Need(std::size_t n, std::string_view field) const {
    if (in_.size() - pos_ < n) {
      Fail("truncated while reading " + std::string(field) + " at byte " +
           std::to_string(pos_));
    }
  }
  uint64_t Little(int n, std::string_view field) {
    Need(n, field);
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }

  std::span<const uint8_t> in_;
  std::string context_;
  std::size_t pos_ = 0;
};

}  // namespace mscaec::internal

#endif  // MSCAEC_SRC_BYTE_IO_H_
