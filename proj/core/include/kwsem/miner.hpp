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

#ifndef KWSEM_MINER_HPP_
#define KWSEM_MINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kwsem/manifest.hpp"
#include "kwsem/vocab.hpp"

namespace kwsem {

struct AlignedWord {
  std::string token;  // lowercase
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const AlignedWord&) const = default;
};

struct AlignmentRecord {
  std::string utterance_id;
  std::string audio_path;
  std::vector<AlignedWord> words;

  bool operator==(const AlignmentRecord&) const = default;
};

// Alignment TSV, one word per line:
//   utterance_id <TAB> audio_path <TAB> token <TAB> start_s <TAB> end_s
// Consecutive lines with the same utterance_id form one record. Blank lines
// and lines starting with '#' are skipped. Throws ParseError (with line
// number) for malformed lines and ValidationError (with utterance id) for
// non-positive or overlapping word intervals.
std::vector<AlignmentRecord> parse_alignments(const std::string& path);
std::vector<AlignmentRecord> parse_alignments_text(const std::string& text,
                                                   const std::string& what = "<text>");
void write_alignments(const std::string& path, const std::vector<AlignmentRecord>& records);
std::string format_alignments(const std::vector<AlignmentRecord>& records);

struct KeywordOccurrence {
  std::string keyword;
  std::string utterance_id;
  std::string audio_path;
  std::size_t first_word = 0;
  std::size_t num_words = 0;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const KeywordOccurrence&) const = default;
  auto operator<=>(const KeywordOccurrence&) const = default;
};

// keyword -> occurrences sorted by (utterance_id, first_word).
using KeywordMap = std::map<std::string, std::vector<KeywordOccurrence>>;

struct MiningConfig {
  std::size_t n_max = 5;
  std::size_t min_chars = 10;  // counts joining spaces
  std::size_t min_count = 10;
};

// Every contiguous n-gram (1 <= n <= n_max) is a candidate; candidates
// shorter than min_chars or with fewer than min_count occurrences are dropped.
KeywordMap mine_keywords(const std::vector<AlignmentRecord>& records, const MiningConfig& config = {});

// Occurrences of the given keywords only, without thresholds.
KeywordMap find_occurrences(const std::vector<AlignmentRecord>& records,
                            const std::set<std::string>& keywords, std::size_t n_max);

struct HoldoutConfig {
  std::size_t holdout_size = 150;
  std::size_t min_holdout_count = 100;
  std::uint64_t seed = 0;
};

struct MinedDataset {
  KeywordVocab vocab;  // pre-training keywords, sorted
  KeywordMap pretrain;
  std::vector<std::string> holdout_vocab;  // sorted
  KeywordMap holdout;
  std::set<std::string> excluded_utterances;
  std::vector<std::string> warnings;
};

// Picks the holdout keywords uniformly (seeded) among those with at least
// min_holdout_count occurrences, removes every utterance containing a
// holdout occurrence from pre-training, and re-applies the eligibility
// thresholds to what remains. Throws DataError when nothing qualifies.
MinedDataset split_holdout(const KeywordMap& mined, const MiningConfig& mining,
                           const HoldoutConfig& config);

struct SplitConfig {
  std::size_t train_per_keyword = 90;
  std::size_t dev_per_keyword = 10;
  std::uint64_t seed = 0;
};

// Pool tag for an utterance ("clean" or "other").
using PoolLookup = std::function<std::string(const std::string& utterance_id)>;

// Train/dev rows are sampled from each keyword's "clean" occurrences; the
// clean remainder and all "other" occurrences become test rows tagged with
// their pool. Throws DataError naming a keyword with too few clean
// occurrences.
std::vector<ManifestRow> make_librikws_splits(const std::vector<std::string>& holdout_vocab,
                                              const KeywordMap& holdout, const PoolLookup& pool_of,
                                              const SplitConfig& config);

// Pre-training manifest. Dev rows come from `dev` (occurrences found in
// separate dev alignments) when given, otherwise a seeded `dev_fraction` of
// each keyword's occurrences (at least one train row is always kept).
std::vector<ManifestRow> make_pretrain_manifest(const MinedDataset& mined,
                                                const std::optional<KeywordMap>& dev,
                                                double dev_fraction, std::uint64_t seed);

}  // namespace kwsem

#endif  // KWSEM_MINER_HPP_
