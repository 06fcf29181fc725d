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

#ifndef KWSEM_AUDIO_HPP_
#define KWSEM_AUDIO_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kwsem {

inline constexpr int kSampleRate = 16000;
inline constexpr double kClipSeconds = 2.0;
inline constexpr std::size_t kClipSamples = 32000;

struct AudioClip {
  std::vector<float> samples;  // in [-1, 1]
  int sample_rate = kSampleRate;
  std::string source_id;

  double duration() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

// Start/end of a region of interest in seconds.
struct TimeSpan {
  double start_s = 0.0;
  double end_s = 0.0;
};

// Reads 16-bit PCM WAV (first channel when multi-channel) and resamples to
// `target_rate` by linear interpolation when the file rate differs.
// Throws IoError (unreadable) or FormatError (not 16-bit PCM / corrupt).
AudioClip load_audio(const std::string& path, int target_rate = kSampleRate);

// Writes mono 16-bit PCM; samples are clipped to [-1, 1].
void write_wav(const std::string& path, std::span<const float> samples, int sample_rate);

// Linear-interpolation resampler; output length round(n * to / from).
std::vector<float> resample_linear(std::span<const float> samples, int from_rate, int to_rate);

// Places `span` (or the whole clip) at the centre of a 2 s buffer. Audio
// around the span fills the rest of the buffer where the source has it, zeros
// elsewhere; spans longer than 2 s are centre-cropped. Throws RangeError for
// an invalid span.
AudioClip fit_to_window(const AudioClip& clip, std::optional<TimeSpan> span = std::nullopt);

}  // namespace kwsem

#endif  // KWSEM_AUDIO_HPP_
