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

// mscaec command line tool.
//
// Results go to stdout as one record per line of space separated key=value
// pairs; a short human summary goes to stderr. A failure prints a single
//   error kind=<kind> message="<text>"
// line to stderr. Exit codes: 0 ok, 1 usage, 2 bad data, 3 internal.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mscaec/allocator.h"
#include "mscaec/codec.h"
#include "mscaec/file_formats.h"
#include "mscaec/metrics.h"
#include "mscaec/status.h"
#include "mscaec/synthetic.h"

namespace mscaec {
namespace {

namespace fs = std::filesystem;

constexpr const char* kWeightsEnv = "MSCAEC_WEIGHTS";

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

// One output record: key=value pairs in insertion order.
class Record {
 public:
  explicit Record(const std::string& type) { line_ << "record=" << type; }
  Record& Add(const std::string& key, const std::string& value) {
    line_ << ' ' << key << '=';
    if (value.find_first_of(" \"=") != std::string::npos || value.empty()) {
      line_ << Quote(value);
    } else {
      line_ << value;
    }
    return *this;
  }
  Record& Add(const std::string& key, int64_t v) {
    return Add(key, std::to_string(v));
  }
  Record& Add(const std::string& key, double v) {
    if (std::isinf(v)) return Add(key, std::string(v > 0 ? "inf" : "-inf"));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return Add(key, std::string(buf));
  }
  void Print() const { std::cout << line_.str() << '\n'; }

 private:
  std::ostringstream line_;
};

void CheckOutputPath(const std::string& path) {
  const fs::path parent = fs::absolute(path).parent_path();
  if (!fs::is_directory(parent)) {
    throw ArgumentError("output directory does not exist: " + parent.string());
  }
}

std::string ResolveWeights(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kWeightsEnv); env != nullptr && *env) {
    if (!fs::is_regular_file(env)) {
      throw ArgumentError(std::string(kWeightsEnv) + " names a missing file: " +
                          env);
    }
    return env;
  }
  throw ArgumentError("no weights: pass --weights or set " +
                      std::string(kWeightsEnv));
}

std::pair<int, int> ParseSize(const std::string& text) {
  const auto x = text.find('x');
  int w = 0, h = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    w = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    h = std::stoi(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ArgumentError("expected WIDTHxHEIGHT, got '" + text + "'");
  }
  if (w <= 0 || h <= 0) throw ArgumentError("image size must be positive");
  return {w, h};
}

DType ParseDType(const std::string& s) {
  return s == "f32" ? DType::kF32 : DType::kI32;
}

void AddRateFields(Record& rec, const RateReport& r) {
  rec.Add("bits_y_estimate", r.bits_y_estimate)
      .Add("bits_y_estimate_all", r.bits_y_estimate_all)
      .Add("bits_z_estimate", r.bits_z_estimate)
      .Add("bits_y_quantized", r.bits_y_quantized)
      .Add("bits_z_quantized", r.bits_z_quantized)
      .Add("bytes_header", r.bytes_header)
      .Add("bytes_flags", r.bytes_flags)
      .Add("bytes_z", r.bytes_z)
      .Add("bytes_y", r.bytes_y)
      .Add("bytes_total", r.bytes_total)
      .Add("pixels", r.pixels)
      .Add("bpp", r.bpp);
}

// Image size defaults to 16x the latent grid (four stride-2 stages).
std::pair<int, int> ImageSize(const std::string& flag, const Tensor& y) {
  if (!flag.empty()) return ParseSize(flag);
  return {16 * y.width(), 16 * y.height()};
}

// ---- encode / decode / estimate ------------------------------------------

struct EncodeArgs {
  std::string weights, latents, hyper, output, image_size;
  bool reference = false;
};

int RunEncode(const EncodeArgs& a) {
  const std::string weights_path = ResolveWeights(a.weights);
  CheckOutputPath(a.output);
  const ModelWeights w = LoadWeights(weights_path);
  const Tensor y = LoadTensor(a.latents);
  const Tensor z = LoadTensor(a.hyper);
  const auto [img_w, img_h] = ImageSize(a.image_size, y);

  const CodecOptions options{a.reference ? ContextPath::kReference
                                         : ContextPath::kCropped};
  const RateReport report = EstimateRates(y, z, w, img_h, img_w);
  const BitstreamContainer c = EncodeLatents(y, z, w, options);
  const auto bytes = c.Serialize();
  if (static_cast<int64_t>(bytes.size()) != report.bytes_total) {
    throw InternalError("container size disagrees with the rate report");
  }
  WriteFileBytes(a.output, bytes);

  Record rec("encode");
  rec.Add("output", a.output);
  AddRateFields(rec, report);
  rec.Print();
  std::cerr << "encoded " << y.height() << "x" << y.width() << "x"
            << y.channels() << " latents into " << bytes.size() << " bytes ("
            << report.bpp << " bpp at " << img_w << "x" << img_h << ")\n";
  return kOk;
}

struct DecodeArgs {
  std::string weights, input, latents_out, hyper_out, dtype = "i32";
  bool reference = false;
};

int RunDecode(const DecodeArgs& a) {
  const std::string weights_path = ResolveWeights(a.weights);
  CheckOutputPath(a.latents_out);
  if (!a.hyper_out.empty()) CheckOutputPath(a.hyper_out);
  const ModelWeights w = LoadWeights(weights_path);
  const BitstreamContainer c =
      BitstreamContainer::Parse(ReadFileBytes(a.input));
  const DecodedLatents d = DecodeLatents(
      c, w, {a.reference ? ContextPath::kReference : ContextPath::kCropped});
  SaveTensor(d.y_hat, a.latents_out, ParseDType(a.dtype));
  if (!a.hyper_out.empty()) {
    SaveTensor(d.z_hat, a.hyper_out, ParseDType(a.dtype));
  }
  Record("decode")
      .Add("input", a.input)
      .Add("latents_out", a.latents_out)
      .Add("height", int64_t{d.y_hat.height()})
      .Add("width", int64_t{d.y_hat.width()})
      .Add("channels", int64_t{d.y_hat.channels()})
      .Add("active_channels",
           int64_t{ChannelFlags::Compute(d.y_hat).CountActive()})
      .Print();
  std::cerr << "decoded " << c.TotalBytes() << " bytes\n";
  return kOk;
}

struct EstimateArgs {
  std::string weights, latents, hyper, image_size;
};

int RunEstimate(const EstimateArgs& a) {
  const ModelWeights w = LoadWeights(ResolveWeights(a.weights));
  const Tensor y = LoadTensor(a.latents);
  const Tensor z = LoadTensor(a.hyper);
  const auto [img_w, img_h] = ImageSize(a.image_size, y);
  const RateReport report = EstimateRates(y, z, w, img_h, img_w);
  Record rec("estimate");
  AddRateFields(rec, report);
  rec.Print();
  std::cerr << "estimated " << (report.bits_y_estimate + report.bits_z_estimate)
            << " model bits, " << report.bytes_total << " coded bytes\n";
  return kOk;
}

// ---- metrics ---------------------------------------------------------------

struct MetricsArgs {
  std::vector<std::string> images;
  std::string weight_set = "default";
};

int RunMetrics(const MetricsArgs& a) {
  if (a.images.empty() || a.images.size() % 2 != 0) {
    throw ArgumentError("metrics takes REFERENCE DISTORTED pairs");
  }
  std::vector<std::pair<std::string, MsSsimWeights>> sets;
  if (a.weight_set == "default" || a.weight_set == "both") {
    sets.push_back({"default", kDefaultMsSsimWeights});
  }
  if (a.weight_set == "average" || a.weight_set == "both") {
    sets.push_back({"average", kAverageMsSsimWeights});
  }
  for (std::size_t i = 0; i < a.images.size(); i += 2) {
    const ImagePlane ref = ReadNetpbm(a.images[i]);
    const ImagePlane dist = ReadNetpbm(a.images[i + 1]);
    const double psnr = Psnr(ref, dist);
    for (const auto& [name, weights] : sets) {
      const double v = MsSsim(ref, dist, weights);
      Record rec("metrics");
      rec.Add("reference", a.images[i])
          .Add("distorted", a.images[i + 1])
          .Add("weights", name)
          .Add("ms_ssim", v);
      if (v < 1.0) {
        rec.Add("ms_ssim_db", MsSsimDb(v));
      } else {
        rec.Add("ms_ssim_db", std::numeric_limits<double>::infinity());
      }
      rec.Add("psnr", psnr).Print();
    }
  }
  std::cerr << "scored " << a.images.size() / 2 << " image pair(s)\n";
  return kOk;
}

// ---- allocate --------------------------------------------------------------

struct AllocateArgs {
  std::string menus;
  int64_t budget_bytes = -1;
  double bpp = 0.0;
  int64_t granularity = 64;
  bool no_prune = false;
};

int RunAllocate(const AllocateArgs& a) {
  const auto text = ReadFileBytes(a.menus);
  const MenuSet m =
      ParseMenus(std::string_view(reinterpret_cast<const char*>(text.data()),
                                  text.size()));
  AllocationProblem p;
  p.images = m.menus;
  if (a.budget_bytes >= 0) {
    p.budget_bytes = a.budget_bytes;
  } else {
    for (std::size_t i = 0; i < m.pixels.size(); ++i) {
      if (m.pixels[i] == 0) {
        throw ArgumentError("--bpp needs a pixel count for image '" +
                            m.image_ids[i] + "'");
      }
    }
    p.budget_bytes = BudgetFromBpp(a.bpp, m.pixels);
  }
  const AllocationResult r =
      Allocate(p, {a.granularity, !a.no_prune});
  for (std::size_t i = 0; i < r.choice.size(); ++i) {
    const Candidate& c = p.images[i][r.choice[i]];
    Record("choice")
        .Add("image", m.image_ids[i])
        .Add("candidate", m.candidate_ids[i][r.choice[i]])
        .Add("bytes", c.bytes)
        .Add("quality", c.quality)
        .Print();
  }
  Record rec("allocation");
  rec.Add("feasible", int64_t{r.feasible})
      .Add("budget_bytes", p.budget_bytes)
      .Add("total_bytes", r.total_bytes)
      .Add("total_quality", r.total_quality)
      .Add("mean_quality", r.total_quality / r.choice.size());
  int64_t pixels = 0;
  for (int64_t px : m.pixels) pixels += px;
  if (pixels > 0 && std::find(m.pixels.begin(), m.pixels.end(), 0) ==
                        m.pixels.end()) {
    rec.Add("bpp", BitsPerPixel(r.total_bytes, pixels));
  }
  rec.Print();
  std::cerr << (r.feasible ? "allocated " : "infeasible budget; cheapest for ")
            << r.choice.size() << " images, " << r.total_bytes << " of "
            << p.budget_bytes << " bytes\n";
  return kOk;
}

// ---- gen-model -------------------------------------------------------------

struct GenModelArgs {
  uint64_t seed = 0;
  std::string output;
  SyntheticDims dims;
  std::string latents_out, hyper_out;
  int latent_height = 16, latent_width = 16;
  double zero_fraction = 0.3;
};

int RunGenModel(const GenModelArgs& a) {
  CheckOutputPath(a.output);
  if (!a.latents_out.empty()) CheckOutputPath(a.latents_out);
  if (!a.hyper_out.empty()) CheckOutputPath(a.hyper_out);
  const ModelWeights w = GenerateSyntheticModel(a.seed, a.dims);
  const auto bytes = SerializeWeights(w);
  WriteFileBytes(a.output, bytes);
  Record rec("gen-model");
  rec.Add("output", a.output)
      .Add("seed", static_cast<int64_t>(a.seed))
      .Add("latent_channels", int64_t{w.latent_channels})
      .Add("hyper_channels", int64_t{w.hyper_channels})
      .Add("bytes", static_cast<int64_t>(bytes.size()));
  if (!a.latents_out.empty()) {
    SyntheticLatentSpec spec;
    spec.height = a.latent_height;
    spec.width = a.latent_width;
    spec.channels = w.latent_channels;
    spec.zero_channel_fraction = a.zero_fraction;
    SaveTensor(SyntheticLatents(a.seed + 1, spec), a.latents_out, DType::kI32);
    rec.Add("latents_out", a.latents_out);
  }
  if (!a.hyper_out.empty()) {
    const Tensor z =
        SyntheticHyperLatents(a.seed + 2, w.HyperSizeFor(a.latent_height),
                              w.HyperSizeFor(a.latent_width), w.z_pmf);
    SaveTensor(z, a.hyper_out, DType::kI32);
    rec.Add("hyper_out", a.hyper_out);
  }
  rec.Print();
  std::cerr << "wrote synthetic model (" << bytes.size() << " bytes)\n";
  return kOk;
}

// ---- selftest --------------------------------------------------------------

struct SelftestArgs {
  uint64_t seed = 0;
  int instances = 50;
};

int RunSelftest(const SelftestArgs& a) {
  if (a.instances <= 0) throw ArgumentError("--instances must be positive");
  int64_t round_trip = 0, dual_path = 0, rate_bound = 0, tamper = 0;
  const int n = a.instances;
  for (int i = 0; i < n; ++i) {
    const uint64_t s = a.seed * 1000003u + i;
    SyntheticDims dims;
    dims.latent_channels = 1 + static_cast<int>(s % 12);
    dims.hyper_channels = 1 + static_cast<int>((s / 12) % 6);
    const ModelWeights w = GenerateSyntheticModel(s, dims);
    SyntheticLatentSpec spec;
    spec.height = 1 + static_cast<int>((s * 7) % 9);
    spec.width = 1 + static_cast<int>((s * 5) % 9);
    spec.channels = dims.latent_channels;
    const Tensor y = SyntheticLatents(s + 1, spec);
    const Tensor z = SyntheticHyperLatents(s + 2, w.HyperSizeFor(spec.height),
                                           w.HyperSizeFor(spec.width),
                                           w.z_pmf);
    EncodeStats stats;
    const BitstreamContainer c = EncodeLatents(y, z, w, {}, &stats);
    const DecodedLatents fast = DecodeLatents(c, w);
    const DecodedLatents slow = DecodeLatents(c, w, {ContextPath::kReference});
    round_trip += fast.y_hat == y && fast.z_hat == z;
    dual_path += fast.y_hat == slow.y_hat && fast.z_hat == slow.z_hat;
    const auto lo = static_cast<std::size_t>(
        std::ceil(stats.y.quantized_bits / 8.0));
    rate_bound += c.y_stream.size() >= lo && c.y_stream.size() <= lo + 8;

    auto bytes = c.Serialize();
    bytes[bytes.size() - 1 - (s % c.y_stream.size())] ^= 0x10;
    bool caught = false;
    try {
      const DecodedLatents d = DecodeLatents(BitstreamContainer::Parse(bytes), w);
      caught = !(d.y_hat == y && d.z_hat == z);
    } catch (const Error&) {
      caught = true;
    }
    tamper += caught;
  }
  int passed = 0;
  for (auto [name, count] : {std::pair{"round_trip", round_trip},
                             {"dual_path", dual_path},
                             {"rate_bound", rate_bound},
                             {"tamper_detected", tamper}}) {
    const bool ok = count == n;
    passed += ok;
    Record("selftest-property")
        .Add("name", std::string(name))
        .Add("instances", int64_t{n})
        .Add("held", count)
        .Add("status", std::string(ok ? "pass" : "fail"))
        .Print();
  }
  Record("selftest")
      .Add("seed", static_cast<int64_t>(a.seed))
      .Add("passed", int64_t{passed})
      .Add("failed", int64_t{4 - passed})
      .Print();
  std::cerr << "selftest: " << passed << "/4 properties held on " << n
            << " instances\n";
  return passed == 4 ? kOk : kInternal;
}

int ErrorLine(const char* kind, const std::string& message, int code) {
  std::cerr << "error kind=" << kind << " message=" << Quote(message) << '\n';
  return code;
}

int Main(int argc, char** argv) {
  CLI::App app{"Latent tensor codec with a multi-scale context model"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "mscaec 1.0");

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Encode latents to a container");
  encode->add_option("--weights", enc.weights,
                     "Weights file (default: $MSCAEC_WEIGHTS)")
      ->check(CLI::ExistingFile);
  encode->add_option("--latents", enc.latents, "Latent tensor file")
      ->required()
      ->check(CLI::ExistingFile);
  encode->add_option("--hyper", enc.hyper, "Hyper latent tensor file")
      ->required()
      ->check(CLI::ExistingFile);
  encode->add_option("-o,--output", enc.output, "Container output path")
      ->required();
  encode->add_option("--image-size", enc.image_size,
                     "Source image WIDTHxHEIGHT for bpp (default 16x latents)");
  encode->add_flag("--reference", enc.reference,
                   "Use the full-convolution context path");

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Decode a container");
  decode->add_option("--weights", dec.weights, "Weights file")
      ->check(CLI::ExistingFile);
  decode->add_option("-i,--input", dec.input, "Container file")
      ->required()
      ->check(CLI::ExistingFile);
  decode->add_option("--latents-out", dec.latents_out, "Latent tensor output")
      ->required();
  decode->add_option("--hyper-out", dec.hyper_out, "Hyper latent output");
  decode->add_option("--dtype", dec.dtype, "Output element type")
      ->check(CLI::IsMember({"i32", "f32"}));
  decode->add_flag("--reference", dec.reference,
                   "Use the full-convolution context path");

  EstimateArgs est;
  auto* estimate =
      app.add_subcommand("estimate", "Report model and coded rates");
  estimate->add_option("--weights", est.weights, "Weights file")
      ->check(CLI::ExistingFile);
  estimate->add_option("--latents", est.latents, "Latent tensor file")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--hyper", est.hyper, "Hyper latent tensor file")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--image-size", est.image_size,
                       "Source image WIDTHxHEIGHT for bpp");

  MetricsArgs met;
  auto* metrics = app.add_subcommand(
      "metrics", "MS-SSIM, MS-SSIM dB and PSNR of PGM/PPM pairs");
  metrics->add_option("images", met.images, "REFERENCE DISTORTED [...]")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--ms-ssim-weights", met.weight_set,
                      "Per-scale weights: default, average or both")
      ->check(CLI::IsMember({"default", "average", "both"}));

  AllocateArgs alloc;
  auto* allocate = app.add_subcommand(
      "allocate", "Choose one stream per image under a byte budget");
  allocate->add_option("--menus", alloc.menus,
                       "Records: image candidate bytes quality [pixels]")
      ->required()
      ->check(CLI::ExistingFile);
  auto* budget = allocate->add_option("--budget-bytes", alloc.budget_bytes,
                                      "Total byte budget")
                     ->check(CLI::NonNegativeNumber);
  auto* bpp = allocate->add_option("--bpp", alloc.bpp,
                                   "Budget in bits per pixel")
                  ->check(CLI::PositiveNumber);
  budget->excludes(bpp);
  allocate->add_option("--granularity", alloc.granularity,
                       "Byte granularity of the DP")
      ->check(CLI::PositiveNumber);
  allocate->add_flag("--no-prune", alloc.no_prune,
                     "Keep dominated candidates");

  GenModelArgs gen;
  auto* gen_model = app.add_subcommand(
      "gen-model", "Write a seeded synthetic weights file");
  gen_model->add_option("--seed", gen.seed, "RNG seed");
  gen_model->add_option("-o,--output", gen.output, "Weights output path")
      ->required();
  gen_model->add_option("--latent-channels", gen.dims.latent_channels)
      ->check(CLI::PositiveNumber);
  gen_model->add_option("--hyper-channels", gen.dims.hyper_channels)
      ->check(CLI::PositiveNumber);
  gen_model->add_option("--hyper-levels", gen.dims.hyper_levels,
                        "Stride-2 stages in the hyper decoder")
      ->check(CLI::Range(0, 6));
  gen_model->add_option("--context-channels", gen.dims.context_channels_each,
                        "Outputs per masked branch (0: 2x latent channels)")
      ->check(CLI::NonNegativeNumber);
  gen_model->add_option("--latents-out", gen.latents_out,
                        "Also write sample latents here");
  gen_model->add_option("--hyper-out", gen.hyper_out,
                        "Also write sample hyper latents here");
  gen_model->add_option("--latent-height", gen.latent_height)
      ->check(CLI::Range(1, 4096));
  gen_model->add_option("--latent-width", gen.latent_width)
      ->check(CLI::Range(1, 4096));
  gen_model->add_option("--zero-fraction", gen.zero_fraction,
                        "Probability of an all-zero latent channel")
      ->check(CLI::Range(0.0, 1.0));

  SelftestArgs self;
  auto* selftest = app.add_subcommand(
      "selftest", "Round-trip and dual-path checks on synthetic data");
  selftest->add_option("--seed", self.seed, "RNG seed");
  selftest->add_option("--instances", self.instances, "Instances to run")
      ->check(CLI::Range(1, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ErrorLine("usage", e.what(), kUsage);
  }

  try {
    if (*encode) return RunEncode(enc);
    if (*decode) return RunDecode(dec);
    if (*estimate) return RunEstimate(est);
    if (*metrics) return RunMetrics(met);
    if (*allocate) {
      if (!*budget && !*bpp) {
        throw ArgumentError("allocate needs --budget-bytes or --bpp");
      }
      return RunAllocate(alloc);
    }
    if (*gen_model) return RunGenModel(gen);
    if (*selftest) return RunSelftest(self);
  } catch (const ArgumentError& e) {
    return ErrorLine(e.kind(), e.what(), kUsage);
  } catch (const InternalError& e) {
    return ErrorLine(e.kind(), e.what(), kInternal);
  } catch (const Error& e) {
    return ErrorLine(e.kind(), e.what(), kData);
  } catch (const std::exception& e) {
    return ErrorLine("internal", e.what(), kInternal);
  }
  return ErrorLine("usage", "no subcommand", kUsage);
}

}  // namespace
}  // namespace mscaec

int main(int argc, char** argv) { return mscaec::Main(argc, argv); }
