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

#include "kwsem/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <numbers>

#include "binary_io.hpp"
#include "kwsem/error.hpp"

namespace kwsem {
namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr char kCacheMagic[4] = {'K', 'S', 'E', 'M'};
constexpr std::uint16_t kCacheVersion = 1;

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank build_filterbank(std::size_t n_mels, double f_lo, double f_hi, std::size_t n_fft,
                               int sample_rate) {
  if (n_mels == 0 || n_fft < 2 || sample_rate <= 0) {
    throw RangeError("filterbank needs n_mels > 0, n_fft >= 2 and a positive sample rate");
  }
  if (!(f_lo >= 0.0) || !(f_lo < f_hi) || f_hi > sample_rate / 2.0) {
    throw RangeError("invalid filterbank band [" + std::to_string(f_lo) + ", " +
                     std::to_string(f_hi) + "] Hz at " + std::to_string(sample_rate) + " Hz");
  }
  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.n_bins = n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(f_lo);
  const double mel_hi = hz_to_mel(f_hi);
  const double spacing = (mel_hi - mel_lo) / static_cast<double>(n_mels + 1);
  fb.breakpoints_hz.resize(n_mels + 2);
  for (std::size_t i = 0; i < n_mels + 2; ++i) {
    fb.breakpoints_hz[i] = mel_to_hz(mel_lo + spacing * static_cast<double>(i));
  }
  fb.breakpoints_hz.front() = f_lo;
  fb.breakpoints_hz.back() = f_hi;

  fb.weights.assign(n_mels * fb.n_bins, 0.0);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = fb.breakpoints_hz[m];
    const double center = fb.breakpoints_hz[m + 1];
    const double right = fb.breakpoints_hz[m + 2];
    for (std::size_t k = 0; k < fb.n_bins; ++k) {
      const double f = bin_hz * static_cast<double>(k);
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb.weights[m * fb.n_bins + k] = w;
    }
    bool any = false;
    for (std::size_t k = 0; k < fb.n_bins; ++k) any = any || fb.weights[m * fb.n_bins + k] > 0.0;
    if (!any) {
      throw RangeError("mel filter " + std::to_string(m) +
                       " covers no FFT bin; use fewer mels or a larger FFT");
    }
  }
  return fb;
}

std::size_t frame_count(std::size_t n_samples, std::size_t window, std::size_t hop) {
  if (n_samples < window || hop == 0) return 0;
  return (n_samples - window) / hop + 1;
}

struct LogMelExtractor::Plan {
  fftw_plan plan = nullptr;
};

LogMelExtractor::LogMelExtractor(FrontendConfig config)
    : config_(config),
      filterbank_(build_filterbank(config.n_mels, config.f_lo, config.f_hi, config.n_fft,
                                   config.sample_rate)),
      plan_(std::make_unique<Plan>()) {
  if (config_.window == 0 || config_.window > config_.n_fft || config_.hop == 0) {
    throw RangeError("frame window must be in [1, n_fft] and hop positive");
  }
  // Periodic Hann.
  hann_.resize(config_.window);
  for (std::size_t i = 0; i < config_.window; ++i) {
    hann_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(config_.window));
  }
  std::vector<double> in(config_.n_fft);
  std::vector<fftw_complex> out(config_.n_fft / 2 + 1);
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  // ESTIMATE keeps the chosen algorithm, and so the output bits, fixed.
  plan_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(config_.n_fft), in.data(), out.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_->plan == nullptr) throw Error("FFTW planning failed");
}

LogMelExtractor::~LogMelExtractor() {
  if (plan_ && plan_->plan != nullptr) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_->plan);
  }
}

LogMelFrames LogMelExtractor::compute(std::span<const float> samples) const {
  const std::size_t frames = frame_count(samples.size(), config_.window, config_.hop);
  if (frames == 0) {
    throw ShapeError("clip of " + std::to_string(samples.size()) +
                     " samples is shorter than one analysis window");
  }
  LogMelFrames out;
  out.frames = frames;
  out.n_mels = config_.n_mels;
  out.values.resize(frames * config_.n_mels);

  const std::size_t bins = filterbank_.n_bins;
  std::vector<double> buf(config_.n_fft, 0.0);
  std::vector<fftw_complex> spec(bins);
  std::vector<double> power(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t base = t * config_.hop;
    for (std::size_t i = 0; i < config_.window; ++i) {
      buf[i] = static_cast<double>(samples[base + i]) * hann_[i];
    }
    std::fill(buf.begin() + static_cast<std::ptrdiff_t>(config_.window), buf.end(), 0.0);
    fftw_execute_dft_r2c(plan_->plan, buf.data(), spec.data());
    for (std::size_t k = 0; k < bins; ++k) {
      power[k] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    }
    for (std::size_t m = 0; m < config_.n_mels; ++m) {
      const double* w = filterbank_.weights.data() + m * bins;
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k) e += w[k] * power[k];
      out.values[t * config_.n_mels + m] = static_cast<float>(std::log(e + config_.log_floor));
    }
  }
  return out;
}

LogMelFrames log_mel(const AudioClip& clip) {
  if (clip.sample_rate != kSampleRate || clip.samples.size() != kClipSamples) {
    throw ShapeError("log_mel expects a 16 kHz clip of " + std::to_string(kClipSamples) +
                     " samples, got " + std::to_string(clip.samples.size()) + " at " +
                     std::to_string(clip.sample_rate) + " Hz");
  }
  static const LogMelExtractor extractor;
  return extractor.compute(clip.samples);
}

void write_feature_cache(const std::string& path, const LogMelFrames& frames) {
  detail::ByteWriter w;
  w.put_bytes(kCacheMagic, 4);
  w.put<std::uint16_t>(kCacheVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(frames.frames));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(frames.n_mels));
  w.put_floats(frames.values);
  detail::write_file_bytes(path, w.bytes());
}

LogMelFrames read_feature_cache(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader r(bytes, path);
  char magic[4];
  r.get_bytes(magic, 4);
  if (std::memcmp(magic, kCacheMagic, 4) != 0) throw FormatError(path + ": bad feature cache magic");
  const auto version = r.get<std::uint16_t>();
  if (version != kCacheVersion) {
    throw FormatError(path + ": unsupported feature cache version " + std::to_string(version));
  }
  LogMelFrames f;
  f.frames = r.get<std::uint32_t>();
  f.n_mels = r.get<std::uint32_t>();
  f.values = r.get_floats(f.frames * f.n_mels);
  if (r.remaining() != 0) throw FormatError(path + ": trailing bytes in feature cache");
  return f;
}

}  // namespace kwsem
