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

#include "mscaec/codec.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "byte_io.h"
#include "mscaec/context_model.h"
#include "mscaec/range_coder.h"
#include "mscaec/status.h"

namespace mscaec {
namespace {

constexpr std::string_view kContainerMagic = "MSCAEC01";
// Upper bound on latent elements accepted from a container.
constexpr uint64_t kMaxContainerElements = uint64_t{1} << 28;

}  // namespace

std::vector<uint8_t> BitstreamContainer::Serialize() const {
  internal::ByteWriter w;
  w.Text(kContainerMagic);
  w.U32(latent_height);
  w.U32(latent_width);
  w.U32(latent_channels);
  w.U32(hyper_height);
  w.U32(hyper_width);
  w.U32(hyper_channels);
  w.I32(q_min);
  w.I32(q_max);
  w.Bytes(flags);
  w.U32(static_cast<uint32_t>(z_stream.size()));
  w.Bytes(z_stream);
  w.U32(static_cast<uint32_t>(y_stream.size()));
  w.Bytes(y_stream);
  return std::move(w.bytes());
}

BitstreamContainer BitstreamContainer::Parse(std::span<const uint8_t> bytes) {
  internal::ByteReader r(bytes, "container");
  if (r.Text(kContainerMagic.size(), "magic") != kContainerMagic) {
    r.Fail("bad magic, expected \"MSCAEC01\"");
  }
  BitstreamContainer c;
  c.latent_height = r.U32("h_y");
  c.latent_width = r.U32("w_y");
  c.latent_channels = r.U32("c_y");
  c.hyper_height = r.U32("h_z");
  c.hyper_width = r.U32("w_z");
  c.hyper_channels = r.U32("c_z");
  for (uint32_t d : {c.latent_height, c.latent_width, c.latent_channels,
                     c.hyper_height, c.hyper_width, c.hyper_channels}) {
    if (d == 0) r.Fail("zero dimension in header");
  }
  if (uint64_t{c.latent_height} * c.latent_width * c.latent_channels >
          kMaxContainerElements ||
      uint64_t{c.hyper_height} * c.hyper_width * c.hyper_channels >
          kMaxContainerElements) {
    r.Fail("declared tensor dims too large");
  }
  c.q_min = r.I32("q_min");
  c.q_max = r.I32("q_max");
  if (c.q_max < c.q_min ||
      int64_t{c.q_max} - c.q_min + 1 > kMaxAlphabetSize) {
    r.Fail("invalid alphabet [" + std::to_string(c.q_min) + ", " +
           std::to_string(c.q_max) + "]");
  }
  const auto flags =
      r.Bytes(ChannelFlags::SerializedSize(c.latent_channels), "flags");
  c.flags.assign(flags.begin(), flags.end());
  const uint32_t z_len = r.U32("z_len");
  const auto z = r.Bytes(z_len, "z substream");
  c.z_stream.assign(z.begin(), z.end());
  const uint32_t y_len = r.U32("y_len");
  const auto y = r.Bytes(y_len, "y substream");
  c.y_stream.assign(y.begin(), y.end());
  if (r.remaining() != 0) {
    r.Fail(std::to_string(r.remaining()) + " trailing bytes");
  }
  return c;
}

LatentSiteModel::LatentSiteModel(const ModelWeights& weights,
                                 const Tensor& psi, int q_min, int q_max,
                                 ContextPath path)
    : weights_(weights),
      psi_(psi),
      q_min_(q_min),
      q_max_(q_max),
      path_(path),
      context_(weights.context.out_channels()),
      mu_(weights.latent_channels),
      sigma_(weights.latent_channels) {}

void LatentSiteModel::CdfsAt(const Tensor& latents, int row, int col,
                             const ChannelFlags& active,
                             std::vector<QuantizedCdf>& cdfs) {
  if (path_ == ContextPath::kCropped) {
    ContextAt(latents, row, col, weights_.context, context_);
  } else {
    const Tensor full = ContextFull(latents, weights_.context);
    const auto site = full.Site(row, col);
    std::copy(site.begin(), site.end(), context_.begin());
  }
  PredictParamsAt(context_, psi_.Site(row, col), weights_.entropy_net, mu_,
                  sigma_);
  cdfs.resize(latents.channels());
  for (int ch = 0; ch < latents.channels(); ++ch) {
    if (!active[ch]) continue;
    cdfs[ch] = BuildCdf(mu_[ch], sigma_[ch], q_min_, q_max_);
  }
  ++sites_;
}

void ValidateLatents(const Tensor& y_hat, const Tensor& z_hat,
                     const ModelWeights& weights) {
  if (y_hat.empty() || z_hat.empty()) {
    throw ArgumentError("latent tensors must be non-empty");
  }
  if (y_hat.channels() != weights.latent_channels) {
    throw ConfigError("latents have " + std::to_string(y_hat.channels()) +
                      " channels, model expects " +
                      std::to_string(weights.latent_channels));
  }
  if (z_hat.channels() != weights.hyper_channels) {
    throw ConfigError("hyper latents have " +
                      std::to_string(z_hat.channels()) +
                      " channels, model expects " +
                      std::to_string(weights.hyper_channels));
  }
  if (!y_hat.IsIntegral() || !z_hat.IsIntegral()) {
    throw ArgumentError("latents must be integer-valued (round upstream)");
  }
  if (!weights.HyperCovers(z_hat.height(), y_hat.height()) ||
      !weights.HyperCovers(z_hat.width(), y_hat.width())) {
    throw ConfigError("hyper grid " + std::to_string(z_hat.height()) + "x" +
                      std::to_string(z_hat.width()) +
                      " does not match latent grid " +
                      std::to_string(y_hat.height()) + "x" +
                      std::to_string(y_hat.width()));
  }
}

std::vector<uint8_t> EncodeHyperLatents(const Tensor& z_hat,
                                        const FactorizedPmf& pmf,
                                        CodingStats* stats) {
  if (z_hat.channels() != pmf.num_channels()) {
    throw ConfigError("hyper latents and factorized prior differ in channels");
  }
  RangeEncoder enc;
  for (int ch = 0; ch < z_hat.channels(); ++ch) {
    const QuantizedCdf cdf = pmf.Cdf(ch);
    for (int r = 0; r < z_hat.height(); ++r) {
      for (int c = 0; c < z_hat.width(); ++c) {
        enc.Encode(static_cast<int>(z_hat.at(r, c, ch)), cdf);
      }
    }
  }
  if (stats != nullptr) {
    stats->symbols = static_cast<int64_t>(enc.pending());
    stats->quantized_bits = enc.quantized_bits();
  }
  return enc.Finish();
}

Tensor DecodeHyperLatents(std::span<const uint8_t> stream, int height,
                          int width, const FactorizedPmf& pmf) {
  Tensor z(height, width, pmf.num_channels());
  RangeDecoder dec(stream);
  for (int ch = 0; ch < z.channels(); ++ch) {
    const QuantizedCdf cdf = pmf.Cdf(ch);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        z.at(r, c, ch) = static_cast<float>(dec.Decode(cdf));
      }
    }
  }
  dec.Finish();
  return z;
}

std::pair<int, int> LatentAlphabet(const Tensor& y_hat) {
  const auto [lo, hi] = std::minmax_element(y_hat.data().begin(),
                                            y_hat.data().end());
  const int64_t q_min = static_cast<int64_t>(*lo) - 1;
  const int64_t q_max = static_cast<int64_t>(*hi) + 1;
  if (q_max - q_min + 1 > kMaxAlphabetSize) {
    throw ArgumentError("latent value range [" + std::to_string(q_min + 1) +
                        ", " + std::to_string(q_max - 1) +
                        "] too wide for 16-bit tables");
  }
  return {static_cast<int>(q_min), static_cast<int>(q_max)};
}

BitstreamContainer EncodeLatents(const Tensor& y_hat, const Tensor& z_hat,
                                 const ModelWeights& weights,
                                 const CodecOptions& options,
                                 EncodeStats* stats) {
  ValidateLatents(y_hat, z_hat, weights);
  BitstreamContainer c;
  c.latent_height = y_hat.height();
  c.latent_width = y_hat.width();
  c.latent_channels = y_hat.channels();
  c.hyper_height = z_hat.height();
  c.hyper_width = z_hat.width();
  c.hyper_channels = z_hat.channels();
  const auto [q_min, q_max] = LatentAlphabet(y_hat);
  c.q_min = q_min;
  c.q_max = q_max;

  c.z_stream = EncodeHyperLatents(z_hat, weights.z_pmf,
                                  stats != nullptr ? &stats->z : nullptr);
  const Tensor psi =
      HyperForward(z_hat, weights, y_hat.height(), y_hat.width());
  const ChannelFlags flags = ChannelFlags::Compute(y_hat);
  c.flags = flags.Serialize();
  LatentSiteModel model(weights, psi, q_min, q_max, options.path);
  c.y_stream = SelectiveEncode(y_hat, flags, model,
                               stats != nullptr ? &stats->y : nullptr);
  return c;
}

DecodedLatents DecodeLatents(const BitstreamContainer& container,
                             const ModelWeights& weights,
                             const CodecOptions& options) {
  if (static_cast<int>(container.latent_channels) != weights.latent_channels ||
      static_cast<int>(container.hyper_channels) != weights.hyper_channels) {
    throw ConfigError("container channel counts do not match the model");
  }
  const int h_y = static_cast<int>(container.latent_height);
  const int w_y = static_cast<int>(container.latent_width);
  if (!weights.HyperCovers(container.hyper_height, h_y) ||
      !weights.HyperCovers(container.hyper_width, w_y)) {
    throw ParseError("container: hyper grid does not match latent grid");
  }
  if (container.flags.size() !=
      static_cast<std::size_t>(
          ChannelFlags::SerializedSize(weights.latent_channels))) {
    throw ParseError("container: flag bytes do not match latent channels");
  }
  DecodedLatents out;
  out.z_hat = DecodeHyperLatents(container.z_stream, container.hyper_height,
                                 container.hyper_width, weights.z_pmf);
  const Tensor psi = HyperForward(out.z_hat, weights, h_y, w_y);
  const ChannelFlags flags =
      ChannelFlags::Parse(container.flags, weights.latent_channels);
  LatentSiteModel model(weights, psi, container.q_min, container.q_max,
                        options.path);
  out.y_hat = SelectiveDecode(container.y_stream, flags, h_y, w_y, model);
  return out;
}

BitEstimate EstimateBits(const Tensor& y_hat, const Tensor& z_hat,
                         const ModelWeights& weights) {
  ValidateLatents(y_hat, z_hat, weights);
  const Tensor psi =
      HyperForward(z_hat, weights, y_hat.height(), y_hat.width());
  const GaussianParams params = PredictParams(
      ContextFull(y_hat, weights.context), psi, weights.entropy_net);
  const ChannelFlags flags = ChannelFlags::Compute(y_hat);

  BitEstimate est;
  est.bits_y_all = RateEstimate(y_hat, params);
  const auto y = y_hat.data();
  const auto mu = params.mu.data();
  const auto sigma = params.sigma.data();
  const int channels = y_hat.channels();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!flags[static_cast<int>(i % channels)]) continue;
    const double p = GaussianPmf(static_cast<int>(y[i]), mu[i], sigma[i]);
    est.bits_y -= std::log2(std::max(p, kLikelihoodFloor));
  }
  est.bits_z = RateEstimateFactorized(z_hat, weights.z_pmf);
  return est;
}

RateReport EstimateRates(const Tensor& y_hat, const Tensor& z_hat,
                         const ModelWeights& weights, int pixel_height,
                         int pixel_width) {
  if (pixel_height <= 0 || pixel_width <= 0) {
    throw ArgumentError("pixel dims must be positive");
  }
  const BitEstimate est = EstimateBits(y_hat, z_hat, weights);
  EncodeStats stats;
  const BitstreamContainer c = EncodeLatents(y_hat, z_hat, weights, {}, &stats);

  RateReport report;
  report.bits_y_estimate = est.bits_y;
  report.bits_y_estimate_all = est.bits_y_all;
  report.bits_z_estimate = est.bits_z;
  report.bits_y_quantized = stats.y.quantized_bits;
  report.bits_z_quantized = stats.z.quantized_bits;
  report.bytes_header = BitstreamContainer::kFixedBytes;
  report.bytes_flags = static_cast<int64_t>(c.flags.size());
  report.bytes_z = static_cast<int64_t>(c.z_stream.size());
  report.bytes_y = static_cast<int64_t>(c.y_stream.size());
  report.bytes_total = report.bytes_header + report.bytes_flags +
                       report.bytes_z + report.bytes_y;
  report.pixels = int64_t{pixel_height} * pixel_width;
  report.bpp = BitsPerPixel(report.bytes_total, report.pixels);
  return report;
}

double BitsPerPixel(int64_t bytes, int64_t pixels) {
  if (pixels <= 0) throw ArgumentError("pixel count must be positive");
  return 8.0 * static_cast<double>(bytes) / static_cast<double>(pixels);
}

}  // namespace mscaec
