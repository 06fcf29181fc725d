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

#ifndef KWSEM_SYNTH_HPP_
#define KWSEM_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kwsem/audio.hpp"
#include "kwsem/miner.hpp"
#include "kwsem/pretrainer.hpp"
#include "kwsem/rng.hpp"

namespace kwsem {

// Toy speech: every letter is a short two-partial tone unit whose
// frequencies and glide direction depend on the letter; words are letter
// sequences and utterances join words with short pauses.

struct SpeakerProfile {
  double pitch_scale = 1.0;  // multiplies every partial
  double rate = 1.0;         // > 1 speaks faster
  double gain = 0.5;
  double noise_std = 0.005;  // additive white noise
};

struct SynthConfig {
  double unit_seconds = 0.055;
  double pause_min_s = 0.05;
  double pause_max_s = 0.15;
  double edge_silence_min_s = 0.05;
  double edge_silence_max_s = 0.25;
  double pitch_min = 0.85;
  double pitch_max = 1.15;
  double rate_min = 0.85;
  double rate_max = 1.15;
  double gain_min = 0.25;
  double gain_max = 0.8;
  double noise_min = 0.002;
  double noise_max = 0.02;
  double jitter = 0.03;  // relative per-unit frequency jitter
};

SpeakerProfile random_speaker(Rng& rng, const SynthConfig& config = {});

// Partial frequencies of a letter unit before speaker scaling.
struct UnitSpec {
  double f1_hz = 0.0;
  double f2_hz = 0.0;
  int glide = 0;  // -1 falling, 0 flat, +1 rising
};
UnitSpec letter_unit(char letter);

// Samples at kSampleRate, no noise or edge silence. Throws ConfigError for
// characters outside a-z.
std::vector<float> synth_word(const std::string& word, const SpeakerProfile& speaker, Rng& rng,
                              const SynthConfig& config = {});

struct SynthUtterance {
  std::vector<float> samples;
  std::vector<AlignedWord> words;
};

// Words separated by random pauses, random silence at both ends, speaker
// gain and noise applied.
SynthUtterance synth_utterance(const std::vector<std::string>& words, const SpeakerProfile& speaker,
                               Rng& rng, const SynthConfig& config = {});

// Distinct lowercase pseudo-words of alternating consonant/vowel letters.
std::vector<std::string> make_pseudo_words(std::size_t count, Rng& rng, std::size_t min_letters = 4,
                                           std::size_t max_letters = 7,
                                           const std::vector<std::string>& exclude = {});

// One 2 s clip with `keyword` (space-separated words) centred, surrounded
// by up to one random filler word on each side.
AudioClip keyword_clip(const std::string& keyword, const std::vector<std::string>& fillers, Rng& rng,
                       const SynthConfig& config = {});

// `per_class` labelled feature sets per keyword (label = index in keywords).
std::vector<LabeledExample> make_keyword_examples(const std::vector<std::string>& keywords,
                                                  std::size_t per_class,
                                                  const std::vector<std::string>& fillers,
                                                  std::uint64_t seed, const SynthConfig& config = {});

struct CorpusConfig {
  std::size_t utterances = 200;
  std::size_t min_words = 4;
  std::size_t max_words = 10;
  std::size_t vocabulary_size = 60;
  std::size_t phrases = 8;            // recurring 2-3 word phrases
  double phrase_probability = 0.5;    // chance per utterance of inserting one phrase
  double other_fraction = 0.3;        // utterances tagged as the "other" pool
  std::uint64_t seed = 0;
  SynthConfig synth;
};

struct Corpus {
  std::vector<AlignmentRecord> records;
  std::vector<std::string> pools;  // "clean" / "other" per record
  std::vector<std::vector<float>> audio;
};

// Generates alignments and audio in memory. Audio paths are
// "<utterance_id>.wav".
Corpus make_corpus(const CorpusConfig& config);

// Writes <dir>/<utt>.wav, <dir>/alignments.tsv and <dir>/pools.tsv.
void write_corpus(const std::string& dir, const Corpus& corpus);

}  // namespace kwsem

#endif  // KWSEM_SYNTH_HPP_
