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

#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <iterator>
#include <unistd.h>

#include "kwsem/synth.hpp"

namespace kwsem::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  path_ = base / (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<double> random_vector(std::size_t n, Rng& rng, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<AlignmentRecord> random_records(Rng& rng, std::size_t utterances, std::size_t vocab_size,
                                            std::size_t min_words, std::size_t max_words) {
  const auto vocab = make_pseudo_words(vocab_size, rng, 2, 6);
  std::vector<AlignmentRecord> out;
  for (std::size_t u = 0; u < utterances; ++u) {
    AlignmentRecord r;
    r.utterance_id = "u" + std::to_string(1000 + u);
    r.audio_path = r.utterance_id + ".wav";
    double t = rng.uniform(0.0, 0.3);
    const std::size_t n = min_words + rng.below(max_words - min_words + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double len = rng.uniform(0.1, 0.5);
      r.words.push_back({vocab[rng.below(vocab.size())], t, t + len});
      t += len + rng.uniform(0.0, 0.2);
    }
    out.push_back(std::move(r));
  }
  return out;
}

SyntheticWords synthetic_words(std::uint64_t seed, std::size_t pretrain, std::size_t heldout,
                               std::size_t fillers) {
  Rng rng(seed);
  const auto words = make_pseudo_words(pretrain + heldout + fillers, rng, 4, 7);
  SyntheticWords w;
  w.pretrain.assign(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(pretrain));
  w.heldout.assign(words.begin() + static_cast<std::ptrdiff_t>(pretrain),
                   words.begin() + static_cast<std::ptrdiff_t>(pretrain + heldout));
  w.fillers.assign(words.begin() + static_cast<std::ptrdiff_t>(pretrain + heldout), words.end());
  return w;
}

std::vector<unsigned char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ArchSpec tiny_arch() {
  ArchSpec spec;
  spec.n_mels = 8;
  spec.input_frames = 16;
  spec.block_channels = {4, 6, 8};
  spec.convs_per_block = 2;
  spec.final_channels = 8;
  spec.final_kernel = 3;
  spec.embedding_dim = 8;
  return spec;
}

std::vector<LabeledExample> toy_examples(std::size_t classes, std::size_t per_class, std::uint64_t seed,
                                         double noise, std::uint64_t pattern_seed) {
  const ArchSpec spec = tiny_arch();
  const std::size_t n = spec.input_frames * spec.n_mels;
  Rng pattern_rng(pattern_seed);
  std::vector<std::vector<float>> means(classes, std::vector<float>(n));
  for (auto& m : means) {
    for (auto& v : m) v = static_cast<float>(pattern_rng.uniform(-2.0, 2.0));
  }
  Rng rng(seed);
  std::vector<LabeledExample> out;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      LabeledExample e;
      e.label = c;
      e.id = std::to_string(c) + "_" + std::to_string(i);
      e.features = {spec.input_frames, spec.n_mels, means[c]};
      for (auto& v : e.features.values) v += static_cast<float>(rng.uniform(-noise, noise));
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace kwsem::testing
