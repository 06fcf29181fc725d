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

#ifndef KWSEM_TESTS_FIXTURES_HPP_
#define KWSEM_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kwsem/miner.hpp"
#include "kwsem/pretrainer.hpp"
#include "kwsem/rng.hpp"
#include "kwsem/tensor.hpp"

namespace kwsem::testing {

// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "kwsem");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

template <typename T>
Tensor4<T> random_tensor(const Shape4& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor4<T> t(shape);
  for (auto& v : t.values()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

std::vector<double> random_vector(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0);

// Alignment records over a small random vocabulary with contiguous,
// non-overlapping word timings.
std::vector<AlignmentRecord> random_records(Rng& rng, std::size_t utterances, std::size_t vocab_size,
                                            std::size_t min_words, std::size_t max_words);

// Word lists for synthetic keyword experiments: disjoint pre-training
// keywords, held-out keywords and filler words.
struct SyntheticWords {
  std::vector<std::string> pretrain;
  std::vector<std::string> heldout;
  std::vector<std::string> fillers;
};
SyntheticWords synthetic_words(std::uint64_t seed, std::size_t pretrain, std::size_t heldout,
                               std::size_t fillers);

std::vector<unsigned char> read_bytes(const std::string& path);

// Small architecture for fast tests: 16 frames x 8 mels, 8-dim embedding.
ArchSpec tiny_arch();

// Class c is a fixed random pattern (seeded by `pattern_seed`) plus uniform
// noise of half-width `noise`.
std::vector<LabeledExample> toy_examples(std::size_t classes, std::size_t per_class, std::uint64_t seed,
                                         double noise = 0.5, std::uint64_t pattern_seed = 99);

}  // namespace kwsem::testing

#endif  // KWSEM_TESTS_FIXTURES_HPP_
