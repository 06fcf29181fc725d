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

#include "kwsem/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "binary_io.hpp"
#include "kwsem/error.hpp"

namespace kwsem {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::int64_t to_samples(double seconds, int rate) {
  return static_cast<std::int64_t>(std::llround(seconds * static_cast<double>(rate)));
}

}  // namespace

AudioClip load_audio(const std::string& path, int target_rate) {
  const std::vector<unsigned char> bytes = detail::read_file_bytes(path);
  detail::ByteReader r(bytes, path);
  char riff[4];
  char wave[4];
  try {
    r.get_bytes(riff, 4);
    r.get<std::uint32_t>();
    r.get_bytes(wave, 4);
  } catch (const FormatError&) {
    throw FormatError(path + ": not a RIFF/WAVE file");
  }
  if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0) {
    throw FormatError(path + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const unsigned char> data;
  bool have_data = false;
  while (r.remaining() >= 8 && !(have_fmt && have_data)) {
    char id[4];
    r.get_bytes(id, 4);
    const auto size = r.get<std::uint32_t>();
    if (size > r.remaining()) {
      // Some writers leave the data size unset; take what is there.
      if (std::memcmp(id, "data", 4) != 0) throw FormatError(path + ": truncated chunk");
    }
    const std::size_t take = std::min<std::size_t>(size, r.remaining());
    if (std::memcmp(id, "fmt ", 4) == 0) {
      detail::ByteReader f(r.rest().first(take), path);
      format = f.get<std::uint16_t>();
      channels = f.get<std::uint16_t>();
      rate = f.get<std::uint32_t>();
      f.get<std::uint32_t>();
      f.get<std::uint16_t>();
      bits = f.get<std::uint16_t>();
      if (format == kFormatExtensible && take >= 26) {
        f.get<std::uint16_t>();
        f.get<std::uint16_t>();
        f.get<std::uint32_t>();
        format = f.get<std::uint16_t>();
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = r.rest().first(take);
      have_data = true;
    }
    r.skip(take);
    if ((take & 1U) != 0 && r.remaining() > 0) r.skip(1);
  }
  if (!have_fmt || !have_data) throw FormatError(path + ": missing fmt or data chunk");
  if (format != kFormatPcm || bits != 16) {
    std::ostringstream os;
    os << path << ": unsupported encoding (format " << format << ", " << bits
       << " bits); need 16-bit PCM";
    throw FormatError(os.str());
  }
  if (channels == 0 || rate == 0) throw FormatError(path + ": invalid fmt chunk");

  const std::size_t frame_bytes = 2U * channels;
  const std::size_t frames = data.size() / frame_bytes;
  AudioClip clip;
  clip.source_id = path;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    std::int16_t s;
    std::memcpy(&s, data.data() + i * frame_bytes, 2);
    clip.samples[i] = static_cast<float>(s) / 32768.0f;
  }
  if (clip.sample_rate != target_rate) {
    clip.samples = resample_linear(clip.samples, clip.sample_rate, target_rate);
    clip.sample_rate = target_rate;
  }
  return clip;
}

void write_wav(const std::string& path, std::span<const float> samples, int sample_rate) {
  detail::ByteWriter w;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  w.put_bytes("RIFF", 4);
  w.put<std::uint32_t>(36 + data_bytes);
  w.put_bytes("WAVE", 4);
  w.put_bytes("fmt ", 4);
  w.put<std::uint32_t>(16);
  w.put<std::uint16_t>(kFormatPcm);
  w.put<std::uint16_t>(1);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sample_rate));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sample_rate) * 2);
  w.put<std::uint16_t>(2);
  w.put<std::uint16_t>(16);
  w.put_bytes("data", 4);
  w.put<std::uint32_t>(data_bytes);
  for (const float s : samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    const auto q = static_cast<std::int16_t>(std::lrint(std::min(c * 32768.0f, 32767.0f)));
    w.put<std::int16_t>(q);
  }
  detail::write_file_bytes(path, w.bytes());
}

std::vector<float> resample_linear(std::span<const float> samples, int from_rate, int to_rate) {
  if (from_rate <= 0 || to_rate <= 0) throw RangeError("sample rates must be positive");
  if (from_rate == to_rate || samples.empty()) return {samples.begin(), samples.end()};
  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(samples.size()) * to_rate / static_cast<double>(from_rate)));
  std::vector<float> out(out_len);
  const double step = static_cast<double>(from_rate) / static_cast<double>(to_rate);
  const std::size_t last = samples.size() - 1;
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto i0 = static_cast<std::size_t>(pos);
    if (i0 >= last) {
      out[i] = samples[last];
      continue;
    }
    const double frac = pos - static_cast<double>(i0);
    out[i] = static_cast<float>((1.0 - frac) * samples[i0] + frac * samples[i0 + 1]);
  }
  return out;
}

AudioClip fit_to_window(const AudioClip& clip, std::optional<TimeSpan> span) {
  const auto n = static_cast<std::int64_t>(clip.samples.size());
  const auto length = to_samples(kClipSeconds, clip.sample_rate);
  std::int64_t start = 0;
  std::int64_t end = n;
  if (span) {
    const double dur = clip.duration();
    if (!(span->start_s >= 0.0) || !(span->start_s < span->end_s) || span->end_s > dur + 1e-9) {
      std::ostringstream os;
      os << "invalid span (" << span->start_s << ", " << span->end_s << ") for clip of " << dur
         << " s";
      throw RangeError(os.str());
    }
    start = to_samples(span->start_s, clip.sample_rate);
    end = std::min(to_samples(span->end_s, clip.sample_rate), n);
  }
  // Window start so that the span centre lands on the buffer centre; spans
  // longer than the window are cropped symmetrically by the same formula.
  const std::int64_t begin = (start + end - length) >= 0 ? (start + end - length) / 2
                                                         : -((length - start - end + 1) / 2);
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.source_id = clip.source_id;
  out.samples.assign(static_cast<std::size_t>(length), 0.0f);
  for (std::int64_t i = 0; i < length; ++i) {
    const std::int64_t src = begin + i;
    if (src >= 0 && src < n) out.samples[static_cast<std::size_t>(i)] = clip.samples[static_cast<std::size_t>(src)];
  }
  return out;
}

}  // namespace kwsem
