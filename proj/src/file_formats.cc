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

#include "mscaec/file_formats.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <string>
#include <string_view>

#include "byte_io.h"
#include "mscaec/status.h"

namespace mscaec {
namespace {

using internal::ByteReader;
using internal::ByteWriter;

constexpr std::string_view kTensorMagic = "MSCATNSR";
constexpr std::string_view kWeightsMagic = "MSCAWGT1";
constexpr uint16_t kTensorVersion = 1;
constexpr uint16_t kWeightsFileVersion = 1;
constexpr float kMaxExactInt = 16777216.0f;  // 2^24

void ExpectMagic(ByteReader& r, std::string_view magic) {
  const std::string got = r.Text(magic.size(), "magic");
  if (got != magic) {
    r.Fail("bad magic, expected \"" + std::string(magic) + "\"");
  }
}

std::string FormatFloat(float v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* ActivationName(Activation a) {
  return a == Activation::kLeakyRelu ? "leaky_relu" : "none";
}

// Key/value manifest with field-level lookups.
class Manifest {
 public:
  void Set(const std::string& key, const std::string& value) {
    order_.push_back(key);
    values_[key] = value;
  }
  void Set(const std::string& key, int value) {
    Set(key, std::to_string(value));
  }

  std::string Render() const {
    std::string out;
    for (const auto& k : order_) out += k + "=" + values_.at(k) + "\n";
    return out;
  }

  static Manifest Parse(std::string_view text) {
    Manifest m;
    std::size_t line_no = 0;
    while (!text.empty()) {
      ++line_no;
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{}
                                          : text.substr(nl + 1);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ParseError("weights manifest line " + std::to_string(line_no) +
                         " is not key=value");
      }
      m.Set(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }
    return m;
  }

  const std::string& Get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
      throw ParseError("weights manifest: missing key '" + key + "'");
    }
    return it->second;
  }
  int GetInt(const std::string& key) const {
    const std::string& v = Get(key);
    int out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw ParseError("weights manifest: key '" + key +
                       "' is not an integer: '" + v + "'");
    }
    return out;
  }
  float GetFloat(const std::string& key) const {
    const std::string& v = Get(key);
    float out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() ||
        !std::isfinite(out)) {
      throw ParseError("weights manifest: key '" + key +
                       "' is not a finite number: '" + v + "'");
    }
    return out;
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

Blob FloatBlob(std::vector<uint32_t> dims, std::vector<float> values) {
  Blob b;
  b.dtype = DType::kF32;
  b.dims = std::move(dims);
  b.f32 = std::move(values);
  return b;
}

struct NamedBlob {
  std::string name;
  Blob blob;
};

void PutLayer(const std::string& name, const ConvLayer& l, Manifest& m,
              std::vector<NamedBlob>& blobs) {
  m.Set(name + ".activation", ActivationName(l.activation));
  m.Set(name + ".leaky_slope", FormatFloat(l.leaky_slope));
  blobs.push_back(
      {name + ".weights",
       FloatBlob({static_cast<uint32_t>(l.kernel_h),
                  static_cast<uint32_t>(l.kernel_w),
                  static_cast<uint32_t>(l.in_channels),
                  static_cast<uint32_t>(l.out_channels)},
                 l.weights)});
  blobs.push_back(
      {name + ".bias", FloatBlob({static_cast<uint32_t>(l.out_channels)}, l.bias)});
}

class BlobTable {
 public:
  void Add(std::string name, Blob blob) {
    if (!blobs_.emplace(name, std::move(blob)).second) {
      throw ParseError("weights: duplicate tensor '" + name + "'");
    }
  }
  const Blob& Get(const std::string& name, DType dtype, std::size_t ndim) const {
    auto it = blobs_.find(name);
    if (it == blobs_.end()) {
      throw ParseError("weights: missing tensor '" + name + "'");
    }
    if (it->second.dtype != dtype || it->second.dims.size() != ndim) {
      throw ParseError("weights: tensor '" + name +
                       "' has the wrong dtype or rank");
    }
    return it->second;
  }

 private:
  std::map<std::string, Blob> blobs_;
};

ConvLayer GetLayer(const std::string& name, const Manifest& m,
                   const BlobTable& blobs, int stride) {
  const Blob& w = blobs.Get(name + ".weights", DType::kF32, 4);
  const Blob& b = blobs.Get(name + ".bias", DType::kF32, 1);
  ConvLayer l;
  l.kernel_h = static_cast<int>(w.dims[0]);
  l.kernel_w = static_cast<int>(w.dims[1]);
  l.in_channels = static_cast<int>(w.dims[2]);
  l.out_channels = static_cast<int>(w.dims[3]);
  l.stride = stride;
  if (b.dims[0] != w.dims[3]) {
    throw ParseError("weights: '" + name + ".bias' length " +
                     std::to_string(b.dims[0]) + " != output channels " +
                     std::to_string(w.dims[3]));
  }
  l.weights = w.f32;
  l.bias = b.f32;
  const std::string act = m.Get(name + ".activation");
  if (act == "none") {
    l.activation = Activation::kNone;
  } else if (act == "leaky_relu") {
    l.activation = Activation::kLeakyRelu;
  } else {
    throw ParseError("weights manifest: key '" + name +
                     ".activation' has unknown value '" + act + "'");
  }
  l.leaky_slope = m.GetFloat(name + ".leaky_slope");
  try {
    l.Validate();
  } catch (const ConfigError& e) {
    throw ParseError("weights: layer '" + name + "': " + e.what());
  }
  return l;
}

}  // namespace

std::size_t Blob::count() const {
  std::size_t n = 1;
  for (uint32_t d : dims) n *= d;
  return n;
}

std::vector<uint8_t> SerializeBlob(const Blob& blob) {
  if (blob.dims.empty() || blob.dims.size() > 4) {
    throw ArgumentError("blob rank must be 1..4");
  }
  const std::size_t n = blob.count();
  if ((blob.dtype == DType::kF32 ? blob.f32.size() : blob.i32.size()) != n) {
    throw ArgumentError("blob data length does not match dims");
  }
  ByteWriter w;
  w.Text(kTensorMagic);
  w.U16(kTensorVersion);
  w.U8(static_cast<uint8_t>(blob.dtype));
  w.U8(static_cast<uint8_t>(blob.dims.size()));
  for (uint32_t d : blob.dims) w.U32(d);
  if (blob.dtype == DType::kF32) {
    for (float v : blob.f32) w.F32(v);
  } else {
    for (int32_t v : blob.i32) w.I32(v);
  }
  return std::move(w.bytes());
}

Blob ParseBlob(std::span<const uint8_t> bytes) {
  ByteReader r(bytes, "tensor");
  ExpectMagic(r, kTensorMagic);
  const uint16_t version = r.U16("version");
  if (version != kTensorVersion) {
    r.Fail("unsupported version " + std::to_string(version));
  }
  Blob b;
  const uint8_t dtype = r.U8("dtype");
  if (dtype > 1) r.Fail("unknown dtype tag " + std::to_string(dtype));
  b.dtype = static_cast<DType>(dtype);
  const uint8_t ndim = r.U8("ndim");
  if (ndim < 1 || ndim > 4) r.Fail("ndim must be 1..4, got " + std::to_string(ndim));
  uint64_t n = 1;
  for (int i = 0; i < ndim; ++i) {
    b.dims.push_back(r.U32("dims"));
    n *= b.dims.back();
    if (n > (uint64_t{1} << 32)) r.Fail("tensor too large");
  }
  if (r.remaining() != n * 4) {
    r.Fail("data holds " + std::to_string(r.remaining()) + " bytes, dims need " +
           std::to_string(n * 4));
  }
  if (b.dtype == DType::kF32) {
    b.f32.resize(n);
    for (auto& v : b.f32) {
      v = r.F32("data");
      if (!std::isfinite(v)) r.Fail("non-finite value in data");
    }
  } else {
    b.i32.resize(n);
    for (auto& v : b.i32) v = r.I32("data");
  }
  return b;
}

std::vector<uint8_t> SerializeTensor(const Tensor& tensor, DType dtype) {
  Blob b;
  b.dtype = dtype;
  b.dims = {static_cast<uint32_t>(tensor.height()),
            static_cast<uint32_t>(tensor.width()),
            static_cast<uint32_t>(tensor.channels())};
  if (dtype == DType::kF32) {
    b.f32.assign(tensor.data().begin(), tensor.data().end());
  } else {
    if (!tensor.IsIntegral()) {
      throw ArgumentError("i32 tensor files need integer values");
    }
    b.i32.reserve(tensor.size());
    for (float v : tensor.data()) {
      if (std::fabs(v) > kMaxExactInt) {
        throw ArgumentError("value too large for i32 tensor file");
      }
      b.i32.push_back(static_cast<int32_t>(v));
    }
  }
  return SerializeBlob(b);
}

Tensor ParseTensor(std::span<const uint8_t> bytes) {
  Blob b = ParseBlob(bytes);
  if (b.dims.size() != 3) {
    throw ParseError("tensor: expected 3 dims (height, width, channels), got " +
                     std::to_string(b.dims.size()));
  }
  if (b.dims[0] == 0 || b.dims[1] == 0 || b.dims[2] == 0 ||
      b.dims[0] > (1u << 20) || b.dims[1] > (1u << 20) ||
      b.dims[2] > (1u << 20)) {
    throw ParseError("tensor: dims out of range");
  }
  std::vector<float> data;
  if (b.dtype == DType::kF32) {
    data = std::move(b.f32);
  } else {
    data.reserve(b.i32.size());
    for (int32_t v : b.i32) {
      if (v > (1 << 24) || v < -(1 << 24)) {
        throw ParseError("tensor: i32 value " + std::to_string(v) +
                         " not exactly representable");
      }
      data.push_back(static_cast<float>(v));
    }
  }
  return Tensor(static_cast<int>(b.dims[0]), static_cast<int>(b.dims[1]),
                static_cast<int>(b.dims[2]), std::move(data));
}

std::vector<uint8_t> SerializeWeights(const ModelWeights& weights) {
  weights.Validate();
  Manifest m;
  std::vector<NamedBlob> blobs;
  m.Set("format_version", weights.format_version);
  m.Set("latent_channels", weights.latent_channels);
  m.Set("hyper_channels", weights.hyper_channels);
  PutLayer("context.3", weights.context.layer3.base(), m, blobs);
  PutLayer("context.5", weights.context.layer5.base(), m, blobs);
  PutLayer("context.7", weights.context.layer7.base(), m, blobs);
  m.Set("entropy.layers", static_cast<int>(weights.entropy_net.layers.size()));
  for (std::size_t i = 0; i < weights.entropy_net.layers.size(); ++i) {
    PutLayer("entropy." + std::to_string(i), weights.entropy_net.layers[i], m,
             blobs);
  }
  m.Set("hyper.layers", static_cast<int>(weights.hyper_decoder.size()));
  for (std::size_t i = 0; i < weights.hyper_decoder.size(); ++i) {
    const HyperLayer& h = weights.hyper_decoder[i];
    const std::string name = "hyper." + std::to_string(i);
    m.Set(name + ".kind", h.kind == HyperLayerKind::kTransposedConv
                              ? "transposed_conv"
                              : "conv");
    m.Set(name + ".stride", h.conv.stride);
    PutLayer(name, h.conv, m, blobs);
  }

  const auto& channels = weights.z_pmf.channels;
  std::size_t widest = 0;
  for (const auto& c : channels) widest = std::max(widest, c.counts.size());
  Blob range;
  range.dtype = DType::kI32;
  range.dims = {static_cast<uint32_t>(channels.size()), 2};
  Blob counts;
  counts.dtype = DType::kI32;
  counts.dims = {static_cast<uint32_t>(channels.size()),
                 static_cast<uint32_t>(widest)};
  counts.i32.assign(channels.size() * widest, 0);
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    range.i32.push_back(channels[ch].z_min);
    range.i32.push_back(channels[ch].z_max());
    for (std::size_t k = 0; k < channels[ch].counts.size(); ++k) {
      const uint32_t v = channels[ch].counts[k];
      if (v > static_cast<uint32_t>(std::numeric_limits<int32_t>::max())) {
        throw ArgumentError("factorized prior count exceeds int32");
      }
      counts.i32[ch * widest + k] = static_cast<int32_t>(v);
    }
  }
  blobs.push_back({"zpmf.range", std::move(range)});
  blobs.push_back({"zpmf.counts", std::move(counts)});

  std::vector<std::vector<uint8_t>> encoded;
  for (const auto& nb : blobs) encoded.push_back(SerializeBlob(nb.blob));

  ByteWriter w;
  w.Text(kWeightsMagic);
  w.U16(kWeightsFileVersion);
  const std::string manifest = m.Render();
  w.U32(static_cast<uint32_t>(manifest.size()));
  w.Text(manifest);
  w.U32(static_cast<uint32_t>(blobs.size()));
  uint64_t offset = 0;
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    w.U16(static_cast<uint16_t>(blobs[i].name.size()));
    w.Text(blobs[i].name);
    w.U64(offset);
    w.U64(encoded[i].size());
    offset += encoded[i].size();
  }
  for (const auto& e : encoded) w.Bytes(e);
  return std::move(w.bytes());
}

ModelWeights ParseWeights(std::span<const uint8_t> bytes) {
  ByteReader r(bytes, "weights");
  ExpectMagic(r, kWeightsMagic);
  const uint16_t version = r.U16("version");
  if (version != kWeightsFileVersion) {
    r.Fail("unsupported file version " + std::to_string(version));
  }
  const uint32_t manifest_len = r.U32("manifest length");
  const Manifest m = Manifest::Parse(r.Text(manifest_len, "manifest"));
  const uint32_t count = r.U32("blob count");
  struct Entry {
    std::string name;
    uint64_t offset;
    uint64_t length;
  };
  std::vector<Entry> index;
  for (uint32_t i = 0; i < count; ++i) {
    Entry e;
    const uint16_t name_len = r.U16("index name length");
    e.name = r.Text(name_len, "index name");
    e.offset = r.U64("index offset");
    e.length = r.U64("index length");
    index.push_back(std::move(e));
  }
  const auto area = bytes.subspan(r.position());
  uint64_t expected_offset = 0;
  BlobTable blobs;
  for (const Entry& e : index) {
    if (e.offset != expected_offset || e.length > area.size() ||
        e.offset > area.size() - e.length) {
      throw ParseError("weights: tensor '" + e.name +
                       "' lies outside the blob area");
    }
    try {
      blobs.Add(e.name, ParseBlob(area.subspan(e.offset, e.length)));
    } catch (const ParseError& err) {
      throw ParseError("weights: tensor '" + e.name + "': " + err.what());
    }
    expected_offset += e.length;
  }
  if (expected_offset != area.size()) {
    throw ParseError("weights: " + std::to_string(area.size() - expected_offset) +
                     " trailing bytes after the blob area");
  }

  ModelWeights w;
  w.format_version = m.GetInt("format_version");
  w.latent_channels = m.GetInt("latent_channels");
  w.hyper_channels = m.GetInt("hyper_channels");
  try {
    w.context.layer3 = MaskedConvLayer(GetLayer("context.3", m, blobs, 1));
    w.context.layer5 = MaskedConvLayer(GetLayer("context.5", m, blobs, 1));
    w.context.layer7 = MaskedConvLayer(GetLayer("context.7", m, blobs, 1));
  } catch (const ConfigError& e) {
    throw ParseError(std::string("weights: context model: ") + e.what());
  }
  const int entropy_layers = m.GetInt("entropy.layers");
  if (entropy_layers < 1 || entropy_layers > 64) {
    throw ParseError("weights manifest: 'entropy.layers' out of range");
  }
  for (int i = 0; i < entropy_layers; ++i) {
    w.entropy_net.layers.push_back(
        GetLayer("entropy." + std::to_string(i), m, blobs, 1));
  }
  const int hyper_layers = m.GetInt("hyper.layers");
  if (hyper_layers < 0 || hyper_layers > 64) {
    throw ParseError("weights manifest: 'hyper.layers' out of range");
  }
  for (int i = 0; i < hyper_layers; ++i) {
    const std::string name = "hyper." + std::to_string(i);
    HyperLayer h;
    const std::string kind = m.Get(name + ".kind");
    if (kind == "conv") {
      h.kind = HyperLayerKind::kConv;
    } else if (kind == "transposed_conv") {
      h.kind = HyperLayerKind::kTransposedConv;
    } else {
      throw ParseError("weights manifest: key '" + name +
                       ".kind' has unknown value '" + kind + "'");
    }
    const int stride = m.GetInt(name + ".stride");
    if (stride < 1 || stride > 64) {
      throw ParseError("weights manifest: key '" + name +
                       ".stride' out of range");
    }
    h.conv = GetLayer(name, m, blobs, stride);
    w.hyper_decoder.push_back(std::move(h));
  }

  const Blob& range = blobs.Get("zpmf.range", DType::kI32, 2);
  const Blob& counts = blobs.Get("zpmf.counts", DType::kI32, 2);
  if (range.dims[1] != 2 || counts.dims[0] != range.dims[0]) {
    throw ParseError("weights: 'zpmf.range' and 'zpmf.counts' shapes disagree");
  }
  const std::size_t widest = counts.dims[1];
  for (std::size_t ch = 0; ch < range.dims[0]; ++ch) {
    FactorizedPmf::Channel c;
    c.z_min = range.i32[2 * ch];
    const int64_t width =
        static_cast<int64_t>(range.i32[2 * ch + 1]) - c.z_min + 1;
    if (width < 1 || static_cast<std::size_t>(width) > widest) {
      throw ParseError("weights: 'zpmf.range' channel " + std::to_string(ch) +
                       " does not fit 'zpmf.counts'");
    }
    for (int64_t k = 0; k < width; ++k) {
      const int32_t v = counts.i32[ch * widest + k];
      if (v <= 0) {
        throw ParseError("weights: 'zpmf.counts' channel " +
                         std::to_string(ch) + " has a non-positive count");
      }
      c.counts.push_back(static_cast<uint32_t>(v));
    }
    for (std::size_t k = width; k < widest; ++k) {
      if (counts.i32[ch * widest + k] != 0) {
        throw ParseError("weights: 'zpmf.counts' padding must be zero");
      }
    }
    w.z_pmf.channels.push_back(std::move(c));
  }
  try {
    w.Validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("weights: ") + e.what());
  }
  return w;
}

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ArgumentError("short write to " + path.string());
}

Tensor LoadTensor(const std::filesystem::path& path) {
  return ParseTensor(ReadFileBytes(path));
}

void SaveTensor(const Tensor& tensor, const std::filesystem::path& path,
                DType dtype) {
  WriteFileBytes(path, SerializeTensor(tensor, dtype));
}

ModelWeights LoadWeights(const std::filesystem::path& path) {
  return ParseWeights(ReadFileBytes(path));
}

void SaveWeights(const ModelWeights& weights,
                 const std::filesystem::path& path) {
  WriteFileBytes(path, SerializeWeights(weights));
}

}  // namespace mscaec
