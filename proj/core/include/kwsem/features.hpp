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

#ifndef KWSEM_FEATURES_HPP_
#define KWSEM_FEATURES_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kwsem/audio.hpp"

namespace kwsem {

struct FrontendConfig {
  int sample_rate = kSampleRate;
  std::size_t window = 400;  // 25 ms
  std::size_t hop = 160;     // 10 ms
  std::size_t n_fft = 512;
  std::size_t n_mels = 40;
  double f_lo = 60.0;
  double f_hi = 7800.0;
  double log_floor = 1e-6;
};

inline constexpr std::size_t kNumMels = 40;
inline constexpr std::size_t kClipFrames = 198;

// Row-major frames x mels.
struct LogMelFrames {
  std::size_t frames = 0;
  std::size_t n_mels = 0;
  std::vector<float> values;

  float at(std::size_t t, std::size_t m) const { return values[t * n_mels + m]; }
};

struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t n_bins = 0;               // n_fft / 2 + 1
  std::vector<double> breakpoints_hz;   // n_mels + 2, ascending
  std::vector<double> weights;          // n_mels x n_bins

  double weight(std::size_t mel, std::size_t bin) const { return weights[mel * n_bins + bin]; }
  double center_hz(std::size_t mel) const { return breakpoints_hz[mel + 1]; }
};

// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular, non-normalised filters with breakpoints equally spaced on the
// mel scale between f_lo and f_hi. Throws RangeError for an invalid band.
MelFilterbank build_filterbank(std::size_t n_mels = 40, double f_lo = 60.0, double f_hi = 7800.0,
                               std::size_t n_fft = 512, int sample_rate = kSampleRate);

// floor((n - window) / hop) + 1, or 0 when n < window.
std::size_t frame_count(std::size_t n_samples, std::size_t window, std::size_t hop);

// Hann window -> real FFT -> power spectrum -> mel filterbank -> log(x + floor).
// Holds an FFT plan; compute() is const and may be called from many threads.
class LogMelExtractor {
 public:
  explicit LogMelExtractor(FrontendConfig config = {});
  ~LogMelExtractor();
  LogMelExtractor(const LogMelExtractor&) = delete;
  LogMelExtractor& operator=(const LogMelExtractor&) = delete;

  const FrontendConfig& config() const { return config_; }
  const MelFilterbank& filterbank() const { return filterbank_; }

  // Any length >= one window.
  LogMelFrames compute(std::span<const float> samples) const;

 private:
  struct Plan;
  FrontendConfig config_;
  MelFilterbank filterbank_;
  std::vector<double> hann_;
  std::unique_ptr<Plan> plan_;
};

// Canonical-clip entry point: requires a 16 kHz, 32000-sample clip and
// returns 198 x 40 frames. Throws ShapeError otherwise.
LogMelFrames log_mel(const AudioClip& clip);

// Feature cache record: "KSEM", u16 version, u32 frames, u32 n_mels, then
// row-major float32, all little-endian.
void write_feature_cache(const std::string& path, const LogMelFrames& frames);
LogMelFrames read_feature_cache(const std::string& path);

}  // namespace kwsem

#endif  // KWSEM_FEATURES_HPP_
