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

// End-to-end latent codec.
//
// Encoding codes the hyper latents with the static factorized tables
// (channel-major, then raster order), decodes them through the hyper
// decoder, and then walks the latent grid in raster order. At each site the
// cropped context, the hyper features and the entropy parameters network
// give a Gaussian per channel, which is turned into a quantized table over
// the stream-wide alphabet [min - 1, max + 1] and fed to the selective
// coder.
//
// Container layout (all integers little-endian):
//   8 bytes  magic "MSCAEC01"
//   u32      h_y, w_y, c_y, h_z, w_z, c_z
//   i32      q_min, q_max
//   ceil(c_y / 8) bytes of channel flags
//   u32      z_len, then z_len bytes of hyper substream
//   u32      y_len, then y_len bytes of latent substream

#ifndef MSCAEC_CODEC_H_
#define MSCAEC_CODEC_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mscaec/entropy_model.h"
#include "mscaec/model_weights.h"
#include "mscaec/selective_codec.h"
#include "mscaec/tensor.h"

namespace mscaec {

struct BitstreamContainer {
  // Magic, six dims, alphabet bounds and the two length fields.
  static constexpr std::size_t kFixedBytes = 8 + 6 * 4 + 2 * 4 + 2 * 4;

  uint32_t latent_height = 0;
  uint32_t latent_width = 0;
  uint32_t latent_channels = 0;
  uint32_t hyper_height = 0;
  uint32_t hyper_width = 0;
  uint32_t hyper_channels = 0;
  int32_t q_min = 0;
  int32_t q_max = 0;
  std::vector<uint8_t> flags;
  std::vector<uint8_t> z_stream;
  std::vector<uint8_t> y_stream;

  std::size_t TotalBytes() const {
    return kFixedBytes + flags.size() + z_stream.size() + y_stream.size();
  }
  std::vector<uint8_t> Serialize() const;
  // Requires the declared lengths to account for every byte.
  static BitstreamContainer Parse(std::span<const uint8_t> bytes);

  bool operator==(const BitstreamContainer&) const = default;
};

enum class ContextPath {
  kCropped,    // 7x7 window per site
  kReference,  // full masked convolutions over the whole grid per site
};

struct CodecOptions {
  ContextPath path = ContextPath::kCropped;
};

// Per-site Gaussian tables for the latents, driven by the context model,
// the decoded hyper features `psi` and the entropy parameters network.
class LatentSiteModel : public SiteModel {
 public:
  LatentSiteModel(const ModelWeights& weights, const Tensor& psi, int q_min,
                  int q_max, ContextPath path = ContextPath::kCropped);

  void CdfsAt(const Tensor& latents, int row, int col,
              const ChannelFlags& active,
              std::vector<QuantizedCdf>& cdfs) override;

  int64_t sites_evaluated() const { return sites_; }

 private:
  const ModelWeights& weights_;
  const Tensor& psi_;
  int q_min_;
  int q_max_;
  ContextPath path_;
  std::vector<float> context_;
  std::vector<float> mu_;
  std::vector<float> sigma_;
  int64_t sites_ = 0;
};

// Checks channel counts, integrality and hyper/latent grid agreement.
void ValidateLatents(const Tensor& y_hat, const Tensor& z_hat,
                     const ModelWeights& weights);

// Hyper substream. Throws CodingError for symbols outside a channel's table.
std::vector<uint8_t> EncodeHyperLatents(const Tensor& z_hat,
                                        const FactorizedPmf& pmf,
                                        CodingStats* stats = nullptr);
Tensor DecodeHyperLatents(std::span<const uint8_t> stream, int height,
                          int width, const FactorizedPmf& pmf);

// Stream alphabet [min(y) - 1, max(y) + 1].
std::pair<int, int> LatentAlphabet(const Tensor& y_hat);

struct EncodeStats {
  CodingStats y;
  CodingStats z;
};

BitstreamContainer EncodeLatents(const Tensor& y_hat, const Tensor& z_hat,
                                 const ModelWeights& weights,
                                 const CodecOptions& options = {},
                                 EncodeStats* stats = nullptr);

struct DecodedLatents {
  Tensor y_hat;
  Tensor z_hat;
};

DecodedLatents DecodeLatents(const BitstreamContainer& container,
                             const ModelWeights& weights,
                             const CodecOptions& options = {});

// Model-side bit counts, no coding involved.
struct BitEstimate {
  // -log2 Gaussian likelihood summed over the channels that get coded
  // (non-zero channels).
  double bits_y = 0.0;
  // The same sum over every latent.
  double bits_y_all = 0.0;
  // -log2 factorized likelihood of the hyper latents.
  double bits_z = 0.0;
};

BitEstimate EstimateBits(const Tensor& y_hat, const Tensor& z_hat,
                         const ModelWeights& weights);

struct RateReport {
  double bits_y_estimate = 0.0;
  double bits_y_estimate_all = 0.0;
  double bits_z_estimate = 0.0;
  // Same sums over the 16-bit tables the coder actually used.
  double bits_y_quantized = 0.0;
  double bits_z_quantized = 0.0;
  int64_t bytes_header = 0;
  int64_t bytes_flags = 0;
  int64_t bytes_z = 0;
  int64_t bytes_y = 0;
  int64_t bytes_total = 0;
  int64_t pixels = 0;
  double bpp = 0.0;
};

// Encodes, then fills every field. bpp = 8 * bytes_total / pixels.
RateReport EstimateRates(const Tensor& y_hat, const Tensor& z_hat,
                         const ModelWeights& weights, int pixel_height,
                         int pixel_width);

double BitsPerPixel(int64_t bytes, int64_t pixels);

}  // namespace mscaec

#endif  // MSCAEC_CODEC_H_
