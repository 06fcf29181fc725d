// Copyright 2026 The kwsem Authors. All Rights Reserved.
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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include "fixtures.hpp"
#include "kwsem/audio.hpp"
#include "kwsem/error.hpp"

namespace kwsem {
namespace {

void write_raw_wav(const std::string& path, const std::vector<std::int16_t>& pcm, int rate,
                   std::uint16_t channels = 1, std::uint16_t bits = 16) {
  std::ofstream out(path, std::ios::binary);
  auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(pcm.size() * 2);
  out.write("RIFF", 4);
  u32(36 + data_bytes);
  out.write("WAVEfmt ", 8);
  u32(16);
  u16(1);
  u16(channels);
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate) * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  out.write("data", 4);
  u32(data_bytes);
  out.write(reinterpret_cast<const char*>(pcm.data()), static_cast<std::streamsize>(data_bytes));
}

std::vector<float> tone(double hz, std::size_t n, int rate, double amp = 0.5) {
  std::vector<float> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate));
  }
  return s;
}

TEST(LoadAudio, SilenceIsZeros) {
  testing::TempDir dir;
  write_raw_wav(dir.file("s.wav"), std::vector<std::int16_t>(32000, 0), 16000);
  const auto clip = load_audio(dir.file("s.wav"));
  ASSERT_EQ(clip.samples.size(), 32000u);
  EXPECT_EQ(clip.sample_rate, 16000);
  for (const float v : clip.samples) EXPECT_EQ(v, 0.0f);
}

TEST(LoadAudio, Int16Scaling) {
  testing::TempDir dir;
  write_raw_wav(dir.file("s.wav"), {16384, -16384, 32767, -32768}, 16000);
  const auto clip = load_audio(dir.file("s.wav"));
  EXPECT_NEAR(clip.samples[0], 0.5, 1e-4);
  EXPECT_NEAR(clip.samples[1], -0.5, 1e-4);
  EXPECT_LE(clip.samples[2], 1.0f);
  EXPECT_GE(clip.samples[3], -1.0f);
}

TEST(LoadAudio, FirstChannelOfStereo) {
  testing::TempDir dir;
  write_raw_wav(dir.file("s.wav"), {1000, -5000, 2000, -5000}, 16000, 2);
  const auto clip = load_audio(dir.file("s.wav"));
  ASSERT_EQ(clip.samples.size(), 2u);
  EXPECT_NEAR(clip.samples[0], 1000.0 / 32768.0, 1e-6);
  EXPECT_NEAR(clip.samples[1], 2000.0 / 32768.0, 1e-6);
}

TEST(LoadAudio, ResampledToneKeepsSpectralPeak) {
  testing::TempDir dir;
  const auto src = tone(440.0, 8000, 8000);
  write_wav(dir.file("t.wav"), src, 8000);
  const auto clip = load_audio(dir.file("t.wav"));
  ASSERT_EQ(clip.samples.size(), 16000u);
  // Direct DFT with 1 Hz bins over the 1 s clip.
  std::size_t best = 0;
  double best_mag = -1.0;
  const double n = static_cast<double>(clip.samples.size());
  for (std::size_t k = 1; k < 2000; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
      acc += static_cast<double>(clip.samples[i]) *
             std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i) / n);
    }
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best = k;
    }
  }
  EXPECT_NEAR(static_cast<double>(best), 440.0, 1.0);
}

TEST(LoadAudio, Errors) {
  testing::TempDir dir;
  EXPECT_THROW(load_audio(dir.file("missing.wav")), IoError);
  {
    std::ofstream out(dir.file("junk.wav"), std::ios::binary);
    out << "this is not a wave file at all, not even close";
  }
  EXPECT_THROW(load_audio(dir.file("junk.wav")), FormatError);
  write_raw_wav(dir.file("b8.wav"), {0, 0, 0, 0}, 16000, 1, 8);
  EXPECT_THROW(load_audio(dir.file("b8.wav")), FormatError);
  try {
    load_audio(dir.file("missing.wav"));
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.wav"), std::string::npos);
  }
}

TEST(WriteWav, RoundTripWithinQuantisation) {
  testing::TempDir dir;
  Rng rng(1);
  std::vector<float> s(1000);
  for (auto& v : s) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  write_wav(dir.file("r.wav"), s, 16000);
  const auto clip = load_audio(dir.file("r.wav"));
  ASSERT_EQ(clip.samples.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(clip.samples[i], s[i], 1.0 / 32767.0);
}

TEST(Resample, LengthAndIdentity) {
  const auto s = tone(100.0, 800, 8000);
  EXPECT_EQ(resample_linear(s, 8000, 16000).size(), 1600u);
  EXPECT_EQ(resample_linear(s, 8000, 8000), s);
  EXPECT_EQ(resample_linear(s, 8000, 4000).size(), 400u);
}

AudioClip ramp_clip(std::size_t n) {
  AudioClip c;
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.samples[i] = static_cast<float>(i + 1) / static_cast<float>(n + 1);
  return c;
}

TEST(FitToWindow, ShortClipIsCentred) {
  const auto clip = ramp_clip(16000);
  const auto out = fit_to_window(clip);
  ASSERT_EQ(out.samples.size(), kClipSamples);
  for (std::size_t i = 0; i < 8000; ++i) {
    EXPECT_EQ(out.samples[i], 0.0f);
    EXPECT_EQ(out.samples[24000 + i], 0.0f);
  }
  for (std::size_t i = 0; i < 16000; ++i) EXPECT_EQ(out.samples[8000 + i], clip.samples[i]);
}

TEST(FitToWindow, ExactLengthUnchanged) {
  const auto clip = ramp_clip(kClipSamples);
  EXPECT_EQ(fit_to_window(clip).samples, clip.samples);
}

TEST(FitToWindow, SpanUsesContext) {
  const auto clip = ramp_clip(48000);
  const auto out = fit_to_window(clip, TimeSpan{1.0, 1.4});
  ASSERT_EQ(out.samples.size(), kClipSamples);
  // Span centre 1.2 s sits at the buffer centre, so the window covers 0.2-2.2 s.
  for (std::size_t i = 0; i < kClipSamples; ++i) ASSERT_EQ(out.samples[i], clip.samples[3200 + i]) << i;
}

TEST(FitToWindow, SpanNearEdgeIsZeroPadded) {
  const auto clip = ramp_clip(16000);
  const auto out = fit_to_window(clip, TimeSpan{0.0, 0.2});
  ASSERT_EQ(out.samples.size(), kClipSamples);
  // Centre 0.1 s lands at 16000; source starts at 16000 - 1600.
  for (std::size_t i = 0; i < 14400; ++i) EXPECT_EQ(out.samples[i], 0.0f);
  for (std::size_t i = 14400; i < 30400; ++i) ASSERT_EQ(out.samples[i], clip.samples[i - 14400]) << i;
  for (std::size_t i = 30400; i < kClipSamples; ++i) ASSERT_EQ(out.samples[i], 0.0f) << i;
}

TEST(FitToWindow, LongSpanIsCentreCropped) {
  const auto clip = ramp_clip(80000);
  const auto out = fit_to_window(clip, TimeSpan{0.5, 4.5});
  ASSERT_EQ(out.samples.size(), kClipSamples);
  EXPECT_EQ(out.samples[0], clip.samples[24000]);
  EXPECT_EQ(out.samples.back(), clip.samples[24000 + kClipSamples - 1]);
}

TEST(FitToWindow, AlwaysTwoSeconds) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto clip = ramp_clip(1600 + rng.below(70000));
    const double dur = clip.duration();
    const double a = rng.uniform(0.0, dur * 0.9);
    const double b = rng.uniform(a + 1e-4, dur);
    EXPECT_EQ(fit_to_window(clip, TimeSpan{a, std::min(b, dur)}).samples.size(), kClipSamples);
    EXPECT_EQ(fit_to_window(clip).samples.size(), kClipSamples);
  }
}

TEST(FitToWindow, InvalidSpan) {
  const auto clip = ramp_clip(16000);
  EXPECT_THROW(fit_to_window(clip, TimeSpan{0.5, 0.5}), RangeError);
  EXPECT_THROW(fit_to_window(clip, TimeSpan{-0.1, 0.5}), RangeError);
  EXPECT_THROW(fit_to_window(clip, TimeSpan{0.5, 1.5}), RangeError);
  EXPECT_THROW(fit_to_window(clip, TimeSpan{0.8, 0.2}), RangeError);
}

}  // namespace
}  // namespace kwsem
