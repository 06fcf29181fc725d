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

#include "kwsem/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "kwsem/error.hpp"
#include "kwsem/features.hpp"

namespace kwsem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t seconds_to_samples(double s) {
  return static_cast<std::size_t>(std::lround(s * kSampleRate));
}

}  // namespace

SpeakerProfile random_speaker(Rng& rng, const SynthConfig& config) {
  SpeakerProfile s;
  s.pitch_scale = rng.uniform(config.pitch_min, config.pitch_max);
  s.rate = rng.uniform(config.rate_min, config.rate_max);
  s.gain = rng.uniform(config.gain_min, config.gain_max);
  s.noise_std = rng.uniform(config.noise_min, config.noise_max);
  return s;
}

UnitSpec letter_unit(char letter) {
  if (letter < 'a' || letter > 'z') {
    throw ConfigError(std::string("synthesizer supports letters a-z, got '") + letter + "'");
  }
  const int i = letter - 'a';
  UnitSpec u;
  u.f1_hz = 300.0 * std::pow(1200.0 / 300.0, (i % 13) / 12.0);
  u.f2_hz = 1300.0 * std::pow(3600.0 / 1300.0, (i % 7) / 6.0);
  u.glide = i % 3 - 1;
  return u;
}

std::vector<float> synth_word(const std::string& word, const SpeakerProfile& speaker, Rng& rng,
                              const SynthConfig& config) {
  if (word.empty()) throw ConfigError("cannot synthesize an empty word");
  const std::size_t unit = std::max<std::size_t>(8, seconds_to_samples(config.unit_seconds / speaker.rate));
  std::vector<float> out;
  out.reserve(unit * word.size());
  double ph1 = rng.uniform(0.0, kTwoPi);
  double ph2 = rng.uniform(0.0, kTwoPi);
  for (const char ch : word) {
    const UnitSpec u = letter_unit(ch);
    const double j1 = 1.0 + config.jitter * (2.0 * rng.uniform() - 1.0);
    const double j2 = 1.0 + config.jitter * (2.0 * rng.uniform() - 1.0);
    const double f1 = u.f1_hz * speaker.pitch_scale * j1;
    const double f2 = u.f2_hz * speaker.pitch_scale * j2;
    for (std::size_t n = 0; n < unit; ++n) {
      const double pos = static_cast<double>(n) / static_cast<double>(unit);
      const double sweep = 1.0 + 0.15 * u.glide * (pos - 0.5);
      ph1 += kTwoPi * f1 * sweep / kSampleRate;
      ph2 += kTwoPi * f2 * sweep / kSampleRate;
      const double env = 0.5 - 0.5 * std::cos(kTwoPi * (static_cast<double>(n) + 0.5) / static_cast<double>(unit));
      out.push_back(static_cast<float>(env * (std::sin(ph1) + 0.5 * std::sin(ph2)) / 1.5));
    }
    ph1 = std::fmod(ph1, kTwoPi);
    ph2 = std::fmod(ph2, kTwoPi);
  }
  return out;
}

SynthUtterance synth_utterance(const std::vector<std::string>& words, const SpeakerProfile& speaker,
                               Rng& rng, const SynthConfig& config) {
  SynthUtterance u;
  auto silence = [&](double lo, double hi) {
    u.samples.resize(u.samples.size() + seconds_to_samples(rng.uniform(lo, hi)), 0.0f);
  };
  silence(config.edge_silence_min_s, config.edge_silence_max_s);
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (w > 0) silence(config.pause_min_s, config.pause_max_s);
    const auto samples = synth_word(words[w], speaker, rng, config);
    const double start = static_cast<double>(u.samples.size()) / kSampleRate;
    u.samples.insert(u.samples.end(), samples.begin(), samples.end());
    const double end = static_cast<double>(u.samples.size()) / kSampleRate;
    u.words.push_back({words[w], start, end});
  }
  silence(config.edge_silence_min_s, config.edge_silence_max_s);
  for (auto& s : u.samples) {
    const double v = speaker.gain * s + speaker.noise_std * rng.normal();
    s = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return u;
}

std::vector<std::string> make_pseudo_words(std::size_t count, Rng& rng, std::size_t min_letters,
                                           std::size_t max_letters, const std::vector<std::string>& exclude) {
  if (min_letters == 0 || max_letters < min_letters) throw ConfigError("invalid pseudo-word length range");
  static const std::string kConsonants = "bcdfghjklmnpqrstvwxz";
  static const std::string kVowels = "aeiouy";
  std::set<std::string> seen(exclude.begin(), exclude.end());
  std::vector<std::string> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw ConfigError("cannot generate enough distinct pseudo-words");
    const std::size_t len = min_letters + rng.below(max_letters - min_letters + 1);
    const bool vowel_first = rng.below(2) == 0;
    std::string w;
    for (std::size_t i = 0; i < len; ++i) {
      const bool vowel = (i % 2 == 0) == vowel_first;
      const std::string& set = vowel ? kVowels : kConsonants;
      w.push_back(set[rng.below(set.size())]);
    }
    if (seen.insert(w).second) out.push_back(w);
  }
  return out;
}

AudioClip keyword_clip(const std::string& keyword, const std::vector<std::string>& fillers, Rng& rng,
                       const SynthConfig& config) {
  std::vector<std::string> kw;
  {
    std::string cur;
    for (const char c : keyword + " ") {
      if (c == ' ') {
        if (!cur.empty()) kw.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
  }
  if (kw.empty()) throw ConfigError("empty keyword");
  std::vector<std::string> words;
  const bool before = !fillers.empty() && rng.below(2) == 1;
  const bool after = !fillers.empty() && rng.below(2) == 1;
  if (before) words.push_back(fillers[rng.below(fillers.size())]);
  const std::size_t first = words.size();
  words.insert(words.end(), kw.begin(), kw.end());
  const std::size_t last = words.size() - 1;
  if (after) words.push_back(fillers[rng.below(fillers.size())]);
  const SpeakerProfile speaker = random_speaker(rng, config);
  const SynthUtterance u = synth_utterance(words, speaker, rng, config);
  AudioClip clip;
  clip.samples = u.samples;
  clip.source_id = keyword;
  return fit_to_window(clip, TimeSpan{u.words[first].start_s, u.words[last].end_s});
}

std::vector<LabeledExample> make_keyword_examples(const std::vector<std::string>& keywords,
                                                  std::size_t per_class,
                                                  const std::vector<std::string>& fillers,
                                                  std::uint64_t seed, const SynthConfig& config) {
  Rng rng(seed);
  std::vector<LabeledExample> out;
  out.reserve(keywords.size() * per_class);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < keywords.size(); ++c) {
      Rng clip_rng = rng.fork();
      LabeledExample e;
      e.features = log_mel(keyword_clip(keywords[c], fillers, clip_rng, config));
      e.label = c;
      e.id = keywords[c] + "#" + std::to_string(i);
      out.push_back(std::move(e));
    }
  }
  return out;
}

Corpus make_corpus(const CorpusConfig& config) {
  if (config.utterances == 0 || config.min_words == 0 || config.max_words < config.min_words ||
      config.vocabulary_size == 0) {
    throw ConfigError("invalid corpus config");
  }
  Rng rng(config.seed);
  const auto vocab = make_pseudo_words(config.vocabulary_size, rng, 3, 7);
  std::vector<std::vector<std::string>> phrases;
  for (std::size_t p = 0; p < config.phrases; ++p) {
    std::vector<std::string> ph;
    const std::size_t len = 2 + rng.below(2);
    for (std::size_t i = 0; i < len; ++i) ph.push_back(vocab[rng.below(vocab.size())]);
    phrases.push_back(std::move(ph));
  }
  // Zipf-like word frequencies.
  std::vector<double> cdf;
  double total = 0.0;
  for (std::size_t r = 0; r < vocab.size(); ++r) cdf.push_back(total += 1.0 / static_cast<double>(r + 1));
  auto draw_word = [&]() {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return vocab[std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), vocab.size() - 1)];
  };

  Corpus corpus;
  const int width = static_cast<int>(std::to_string(config.utterances).size());
  for (std::size_t n = 0; n < config.utterances; ++n) {
    std::vector<std::string> words;
    const std::size_t len = config.min_words + rng.below(config.max_words - config.min_words + 1);
    for (std::size_t i = 0; i < len; ++i) words.push_back(draw_word());
    if (!phrases.empty() && rng.uniform() < config.phrase_probability) {
      const auto& ph = phrases[rng.below(phrases.size())];
      const std::size_t at = rng.below(words.size() + 1);
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), ph.begin(), ph.end());
    }
    const SpeakerProfile speaker = random_speaker(rng, config.synth);
    SynthUtterance u = synth_utterance(words, speaker, rng, config.synth);
    std::string id = std::to_string(n);
    id = "utt" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id;
    AlignmentRecord rec;
    rec.utterance_id = id;
    rec.audio_path = id + ".wav";
    rec.words = std::move(u.words);
    corpus.records.push_back(std::move(rec));
    corpus.pools.push_back(rng.uniform() < config.other_fraction ? "other" : "clean");
    corpus.audio.push_back(std::move(u.samples));
  }
  return corpus;
}

void write_corpus(const std::string& dir, const Corpus& corpus) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    write_wav((fs::path(dir) / corpus.records[i].audio_path).string(), corpus.audio.at(i), kSampleRate);
  }
  write_alignments((fs::path(dir) / "alignments.tsv").string(), corpus.records);
  std::ofstream pools(fs::path(dir) / "pools.tsv", std::ios::binary);
  if (!pools) throw IoError("cannot write pools.tsv in " + dir);
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    pools << corpus.records[i].utterance_id << '\t' << corpus.pools.at(i) << '\n';
  }
  if (!pools) throw IoError("write failed: pools.tsv in " + dir);
}

}  // namespace kwsem
