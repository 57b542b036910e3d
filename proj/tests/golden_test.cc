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

// Checked-in fixtures in tests/fixtures:
//   model.mscawgt     synthetic weights, seed 2026, c_y 8, c_z 4
//   latents.mscatnsr  8x8x8 i32 latents
//   hyper.mscatnsr    2x2x4 i32 hyper latents
//   golden.mscaec     their container
// Any change to the coder, the model arithmetic or the formats that moves a
// single byte shows up here.

#include <algorithm>
#include <string>

#include <gtest/gtest.h>

#include "mscaec/codec.h"
#include "mscaec/file_formats.h"

namespace mscaec {
namespace {

std::string Fixture(const char* name) {
  return std::string(MSCAEC_FIXTURE_DIR) + "/" + name;
}

uint32_t U32At(const std::vector<uint8_t>& b, std::size_t off) {
  return b[off] | b[off + 1] << 8 | b[off + 2] << 16 |
         static_cast<uint32_t>(b[off + 3]) << 24;
}

TEST(GoldenTest, FilesReserializeByteIdentically) {
  const auto w_bytes = ReadFileBytes(Fixture("model.mscawgt"));
  EXPECT_EQ(SerializeWeights(ParseWeights(w_bytes)), w_bytes);
  for (const char* name : {"latents.mscatnsr", "hyper.mscatnsr"}) {
    const auto bytes = ReadFileBytes(Fixture(name));
    EXPECT_EQ(SerializeTensor(ParseTensor(bytes), DType::kI32), bytes) << name;
  }
  const auto c_bytes = ReadFileBytes(Fixture("golden.mscaec"));
  EXPECT_EQ(BitstreamContainer::Parse(c_bytes).Serialize(), c_bytes);
}

// Header fields read straight from the raw bytes, and the flags and
// alphabet recomputed from the raw i32 latent data.
TEST(GoldenTest, HeaderAgreesWithRawLatentBytes) {
  const auto c = ReadFileBytes(Fixture("golden.mscaec"));
  const auto y = ReadFileBytes(Fixture("latents.mscatnsr"));
  ASSERT_EQ(std::string(c.begin(), c.begin() + 8), "MSCAEC01");
  const uint32_t dims[6] = {8, 8, 8, 2, 2, 4};
  for (int i = 0; i < 6; ++i) EXPECT_EQ(U32At(c, 8 + 4 * i), dims[i]);

  // Latent blob: 8 magic, 2 version, 1 dtype, 1 ndim, 3 dims.
  const std::size_t data = 8 + 2 + 1 + 1 + 3 * 4;
  ASSERT_EQ(y.size(), data + 8 * 8 * 8 * 4);
  // Zero channels exist, so starting the range at 0 loses nothing.
  int32_t lo = 0, hi = 0;
  uint8_t flags = 0;
  for (int i = 0; i < 8 * 8 * 8; ++i) {
    const auto v = static_cast<int32_t>(U32At(y, data + 4 * i));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (v != 0) flags |= static_cast<uint8_t>(1u << (i % 8));
  }
  EXPECT_EQ(static_cast<int32_t>(U32At(c, 32)), lo - 1);
  EXPECT_EQ(static_cast<int32_t>(U32At(c, 36)), hi + 1);
  EXPECT_EQ(c[40], flags);
  // Some channels are zero and some are not, so the fixture exercises both.
  EXPECT_NE(flags, 0x00);
  EXPECT_NE(flags, 0xff);

  const uint32_t z_len = U32At(c, 41);
  const uint32_t y_len = U32At(c, 45 + z_len);
  EXPECT_EQ(BitstreamContainer::kFixedBytes + 1 + z_len + y_len, c.size());
}

TEST(GoldenTest, EncodeReproducesContainer) {
  const ModelWeights w = LoadWeights(Fixture("model.mscawgt"));
  const Tensor y = LoadTensor(Fixture("latents.mscatnsr"));
  const Tensor z = LoadTensor(Fixture("hyper.mscatnsr"));
  const auto golden = ReadFileBytes(Fixture("golden.mscaec"));
  EXPECT_EQ(EncodeLatents(y, z, w).Serialize(), golden);
  EXPECT_EQ(EncodeLatents(y, z, w, {ContextPath::kReference}).Serialize(),
            golden);
}

TEST(GoldenTest, DecodeReproducesLatentFiles) {
  const ModelWeights w = LoadWeights(Fixture("model.mscawgt"));
  const auto c =
      BitstreamContainer::Parse(ReadFileBytes(Fixture("golden.mscaec")));
  for (ContextPath path : {ContextPath::kCropped, ContextPath::kReference}) {
    const DecodedLatents d = DecodeLatents(c, w, {path});
    EXPECT_EQ(SerializeTensor(d.y_hat, DType::kI32),
              ReadFileBytes(Fixture("latents.mscatnsr")));
    EXPECT_EQ(SerializeTensor(d.z_hat, DType::kI32),
              ReadFileBytes(Fixture("hyper.mscatnsr")));
  }
}

}  // namespace
}  // namespace mscaec
