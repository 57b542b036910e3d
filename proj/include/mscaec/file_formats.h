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

// On-disk formats. All integers are little-endian.
//
// Tensor file ("blob"):
//   8 bytes  magic "MSCATNSR"
//   u16      version (1)
//   u8       dtype: 0 = f32, 1 = i32
//   u8       ndim (1..4)
//   u32      dims[ndim]
//   data     product(dims) values, 4 bytes each
// Latent tensors are 3-D blobs of shape (height, width, channels).
//
// Weights file:
//   8 bytes  magic "MSCAWGT1"
//   u16      version (1)
//   u32      manifest length, then the manifest: UTF-8 "key=value" lines
//   u32      blob count
//   index    per blob: u16 name length, name, u64 offset, u64 length;
//            offsets are relative to the start of the blob area
//   blob area, blobs back to back in index order
// Each conv layer <name> stores "<name>.weights" (f32, [kh, kw, in, out]) and
// "<name>.bias" (f32, [out]); the manifest carries the layer kinds, strides
// and activations. The factorized prior is "zpmf.range" (i32, [c_z, 2]) and
// "zpmf.counts" (i32, [c_z, widest alphabet], zero padded).

#ifndef MSCAEC_FILE_FORMATS_H_
#define MSCAEC_FILE_FORMATS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mscaec/model_weights.h"
#include "mscaec/tensor.h"

namespace mscaec {

enum class DType : uint8_t { kF32 = 0, kI32 = 1 };

struct Blob {
  DType dtype = DType::kF32;
  std::vector<uint32_t> dims;
  std::vector<float> f32;
  std::vector<int32_t> i32;

  std::size_t count() const;
};

std::vector<uint8_t> SerializeBlob(const Blob& blob);
// Parses exactly one blob that fills `bytes`.
Blob ParseBlob(std::span<const uint8_t> bytes);

// i32 storage requires integral values that fit in int32.
std::vector<uint8_t> SerializeTensor(const Tensor& tensor, DType dtype);
// Requires a 3-D blob. i32 values must be exactly representable as float.
Tensor ParseTensor(std::span<const uint8_t> bytes);

std::vector<uint8_t> SerializeWeights(const ModelWeights& weights);
// Parses and validates.
ModelWeights ParseWeights(std::span<const uint8_t> bytes);

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes);

Tensor LoadTensor(const std::filesystem::path& path);
void SaveTensor(const Tensor& tensor, const std::filesystem::path& path,
                DType dtype);
ModelWeights LoadWeights(const std::filesystem::path& path);
void SaveWeights(const ModelWeights& weights,
                 const std::filesystem::path& path);

}  // namespace mscaec

#endif  // MSCAEC_FILE_FORMATS_H_
