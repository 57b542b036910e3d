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

#include <random>

#include <gtest/gtest.h>

#include "mscaec/status.h"
#include "mscaec/synthetic.h"

namespace mscaec {
namespace {

// Fixed per-channel Gaussians whose means depend on the previous site, so
// the decoder has to feed back what it already decoded.
class ToyModel : public SiteModel {
 public:
  ToyModel(int q_min, int q_max) : q_min_(q_min), q_max_(q_max) {}

  void CdfsAt(const Tensor& latents, int row, int col,
              const ChannelFlags& active,
              std::vector<QuantizedCdf>& cdfs) override {
    ++calls_;
    cdfs.resize(latents.channels());
    for (int ch = 0; ch < latents.channels(); ++ch) {
      if (!active[ch]) continue;
      const double prev = col > 0 ? latents.at(row, col - 1, ch) : 0.0;
      cdfs[ch] = BuildCdf(0.5 * prev, 1.0 + 0.1 * (ch % 7), q_min_, q_max_);
    }
  }
  int calls() const { return calls_; }

 private:
  int q_min_;
  int q_max_;
  int calls_ = 0;
};

Tensor Latents(uint64_t seed, int h, int w, int c, double zero_fraction) {
  SyntheticLatentSpec spec;
  spec.height = h;
  spec.width = w;
  spec.channels = c;
  spec.zero_channel_fraction = zero_fraction;
  spec.max_abs = 15;
  return SyntheticLatents(seed, spec);
}

TEST(ChannelFlagsTest, AllZeroTensorGives16ZeroBytes) {
  const ChannelFlags f = ChannelFlags::Compute(Tensor(4, 4, 128));
  EXPECT_EQ(f.CountActive(), 0);
  const auto bytes = f.Serialize();
  EXPECT_EQ(bytes, std::vector<uint8_t>(16, 0));
}

TEST(ChannelFlagsTest, SingleNonZeroChannel) {
  Tensor t(3, 3, 12);
  t.at(2, 1, 5) = -1.0f;
  const ChannelFlags f = ChannelFlags::Compute(t);
  for (int ch = 0; ch < 12; ++ch) EXPECT_EQ(f[ch], ch == 5);
  // LSB first: channel 5 is bit 5 of byte 0.
  EXPECT_EQ(f.Serialize(), (std::vector<uint8_t>{0x20, 0x00}));
}

TEST(ChannelFlagsTest, MatchesPerChannelScan) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Tensor t = Latents(seed, 5, 4, 37, 0.5);
    const ChannelFlags f = ChannelFlags::Compute(t);
    for (int ch = 0; ch < 37; ++ch) {
      bool any = false;
      for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 4; ++c) any |= t.at(r, c, ch) != 0.0f;
      ASSERT_EQ(f[ch], any) << "seed " << seed << " channel " << ch;
    }
    EXPECT_EQ(ChannelFlags::Parse(f.Serialize(), 37), f);
  }
}

TEST(ChannelFlagsTest, ParseRejectsBadInput) {
  EXPECT_THROW(ChannelFlags::Parse(std::vector<uint8_t>(2, 0), 17),
               ParseError);
  // Padding bits past the last channel must be zero.
  EXPECT_THROW(ChannelFlags::Parse(std::vector<uint8_t>{0x00, 0x00, 0x80}, 17),
               ParseError);
}

TEST(SelectiveCodecTest, HalfZeroChannelsHalveSymbols) {
  Tensor t = Latents(1, 6, 6, 128, 0.0);
  for (int ch = 0; ch < 128; ch += 2)
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) t.at(r, c, ch) = 0.0f;
  // Keep every odd channel non-zero.
  for (int ch = 1; ch < 128; ch += 2) t.at(0, 0, ch) = 1.0f;
  ToyModel model(-20, 20);
  CodingStats selective, full;
  const ChannelFlags flags = ChannelFlags::Compute(t);
  ASSERT_EQ(flags.CountActive(), 64);
  SelectiveEncode(t, flags, model, &selective);
  EncodeSites(t, ChannelFlags::AllActive(128), model, &full);
  EXPECT_EQ(full.symbols, 6 * 6 * 128);
  EXPECT_EQ(selective.symbols * 2, full.symbols);
}

TEST(SelectiveCodecTest, NoSkipEqualsNonSelectiveCoding) {
  Tensor t = Latents(2, 5, 5, 16, 0.0);
  for (int ch = 0; ch < 16; ++ch) t.at(4, 4, ch) = 2.0f;
  ToyModel model(-20, 20);
  const ChannelFlags flags = ChannelFlags::Compute(t);
  ASSERT_EQ(flags.CountActive(), 16);
  EXPECT_EQ(SelectiveEncode(t, flags, model),
            EncodeSites(t, ChannelFlags::AllActive(16), model));
}

TEST(SelectiveCodecTest, AllZeroIsFlushOnly) {
  const Tensor t(4, 4, 128);
  ToyModel model(-1, 1);
  const ChannelFlags flags = ChannelFlags::Compute(t);
  const auto payload = SelectiveEncode(t, flags, model);
  EXPECT_EQ(payload.size(), 8u);
  EXPECT_EQ(model.calls(), 0);
  const Tensor back = SelectiveDecode(payload, flags, 4, 4, model);
  EXPECT_EQ(back, t);
}

TEST(SelectiveCodecTest, RoundTrip) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const Tensor t = Latents(seed, 1 + seed % 7, 1 + seed % 5, 9, 0.4);
    ToyModel model(-16, 16);
    const ChannelFlags flags = ChannelFlags::Compute(t);
    const auto payload = SelectiveEncode(t, flags, model);
    const Tensor back =
        SelectiveDecode(payload, flags, t.height(), t.width(), model);
    ASSERT_EQ(back, t) << "seed " << seed;
  }
}

TEST(SelectiveCodecTest, SelectiveNeverLargerThanFullPlusFlags) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Tensor t = Latents(seed, 6, 6, 24, 0.5);
    ToyModel model(-16, 16);
    const ChannelFlags flags = ChannelFlags::Compute(t);
    const std::size_t sel = SelectiveEncode(t, flags, model).size() +
                            flags.Serialize().size();
    const std::size_t full =
        EncodeSites(t, ChannelFlags::AllActive(24), model).size();
    // The zero symbols of a skipped channel still cost bits unless the
    // model is certain, so dropping them never grows the payload by more
    // than the flag bytes plus flush jitter.
    EXPECT_LE(sel, full + flags.Serialize().size() + 8) << seed;
  }
}

TEST(SelectiveCodecTest, WrongFlagsRejected) {
  const Tensor t = Latents(3, 4, 4, 8, 0.0);
  ToyModel model(-16, 16);
  EXPECT_THROW(SelectiveEncode(t, ChannelFlags(std::vector<bool>(8, false)),
                               model),
               InternalError);
}

TEST(SelectiveCodecTest, TamperedPayloadNotSilentlyAccepted) {
  const Tensor t = Latents(4, 6, 6, 6, 0.0);
  ToyModel model(-16, 16);
  const ChannelFlags flags = ChannelFlags::Compute(t);
  const auto payload = SelectiveEncode(t, flags, model);
  for (std::size_t i = 0; i < payload.size(); ++i) {
    auto bad = payload;
    bad[i] ^= 0x01;
    bool detected = false;
    try {
      detected = SelectiveDecode(bad, flags, 6, 6, model) != t;
    } catch (const CodingError&) {
      detected = true;
    }
    EXPECT_TRUE(detected) << "byte " << i;
  }
}

}  // namespace
}  // namespace mscaec
