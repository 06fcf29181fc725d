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

#include "kwsem/miner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kwsem/error.hpp"
#include "kwsem/rng.hpp"

namespace kwsem {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return out;
}

double parse_seconds(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(where + ": invalid time '" + s + "'");
  }
  return v;
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// UTF-8 code points.
std::size_t char_count(const std::string& s) {
  std::size_t n = 0;
  for (const char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0U) != 0x80U) ++n;
  }
  return n;
}

void validate_record(const AlignmentRecord& r) {
  double prev_end = -1.0;
  for (std::size_t i = 0; i < r.words.size(); ++i) {
    const AlignedWord& w = r.words[i];
    if (!(w.end_s > w.start_s) || w.start_s < 0.0) {
      throw ValidationError("utterance " + r.utterance_id + ": word " + std::to_string(i) + " ('" +
                            w.token + "') has end <= start or negative start");
    }
    if (w.start_s < prev_end) {
      throw ValidationError("utterance " + r.utterance_id + ": word " + std::to_string(i) + " ('" +
                            w.token + "') overlaps or precedes the previous word");
    }
    prev_end = w.end_s;
  }
}

void sort_occurrences(KeywordMap& map) {
  for (auto& [k, occ] : map) {
    std::sort(occ.begin(), occ.end(), [](const KeywordOccurrence& a, const KeywordOccurrence& b) {
      if (a.utterance_id != b.utterance_id) return a.utterance_id < b.utterance_id;
      return a.first_word < b.first_word;
    });
  }
}

template <typename Accept>
KeywordMap enumerate_ngrams(const std::vector<AlignmentRecord>& records, std::size_t n_max,
                            Accept&& accept) {
  KeywordMap map;
  for (const auto& r : records) {
    const std::size_t len = r.words.size();
    for (std::size_t i = 0; i < len; ++i) {
      std::string key;
      for (std::size_t n = 1; n <= n_max && i + n <= len; ++n) {
        if (n > 1) key += ' ';
        key += r.words[i + n - 1].token;
        if (!accept(key)) continue;
        map[key].push_back(KeywordOccurrence{key, r.utterance_id, r.audio_path, i, n,
                                             r.words[i].start_s, r.words[i + n - 1].end_s});
      }
    }
  }
  sort_occurrences(map);
  return map;
}

}  // namespace

std::vector<AlignmentRecord> parse_alignments_text(const std::string& text, const std::string& what) {
  std::vector<AlignmentRecord> records;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = what + ":" + std::to_string(lineno);
    const auto f = split_tabs(line);
    if (f.size() != 5) {
      throw ParseError(where + ": expected 5 tab-separated fields, got " + std::to_string(f.size()));
    }
    if (f[0].empty() || f[2].empty()) throw ParseError(where + ": empty utterance id or token");
    AlignedWord w{lowercase(f[2]), parse_seconds(f[3], where), parse_seconds(f[4], where)};
    if (records.empty() || records.back().utterance_id != f[0]) {
      if (!seen.insert(f[0]).second) {
        throw ParseError(where + ": utterance " + f[0] + " is not contiguous in the file");
      }
      records.push_back(AlignmentRecord{f[0], f[1], {}});
    } else if (records.back().audio_path != f[1]) {
      throw ParseError(where + ": audio path changes within utterance " + f[0]);
    }
    records.back().words.push_back(std::move(w));
  }
  for (const auto& r : records) validate_record(r);
  return records;
}

std::vector<AlignmentRecord> parse_alignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_alignments_text(ss.str(), path);
}

std::string format_alignments(const std::vector<AlignmentRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    for (const auto& w : r.words) {
      out << r.utterance_id << '\t' << r.audio_path << '\t' << w.token << '\t'
          << format_double(w.start_s) << '\t' << format_double(w.end_s) << '\n';
    }
  }
  return out.str();
}

void write_alignments(const std::string& path, const std::vector<AlignmentRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << format_alignments(records);
  if (!out) throw IoError("write failed: " + path);
}

KeywordMap mine_keywords(const std::vector<AlignmentRecord>& records, const MiningConfig& config) {
  KeywordMap all = enumerate_ngrams(records, config.n_max, [&](const std::string& key) {
    return char_count(key) >= config.min_chars;
  });
  for (auto it = all.begin(); it != all.end();) {
    if (it->second.size() < config.min_count) {
      it = all.erase(it);
    } else {
      ++it;
    }
  }
  return all;
}

KeywordMap find_occurrences(const std::vector<AlignmentRecord>& records,
                            const std::set<std::string>& keywords, std::size_t n_max) {
  return enumerate_ngrams(records, n_max,
                          [&](const std::string& key) { return keywords.count(key) != 0; });
}

MinedDataset split_holdout(const KeywordMap& mined, const MiningConfig& mining,
                           const HoldoutConfig& config) {
  std::vector<std::string> qualifying;
  for (const auto& [k, occ] : mined) {
    if (occ.size() >= config.min_holdout_count) qualifying.push_back(k);
  }
  if (qualifying.empty()) {
    throw DataError("no keyword has at least " + std::to_string(config.min_holdout_count) +
                    " occurrences; cannot form a holdout set");
  }
  MinedDataset out;
  std::vector<std::string> chosen;
  if (qualifying.size() <= config.holdout_size) {
    if (qualifying.size() < config.holdout_size) {
      out.warnings.push_back("only " + std::to_string(qualifying.size()) + " keywords have >= " +
                             std::to_string(config.min_holdout_count) +
                             " occurrences; holding out all of them instead of " +
                             std::to_string(config.holdout_size));
    }
    chosen = qualifying;
  } else {
    Rng rng(config.seed);
    for (const std::size_t i : rng.sample_without_replacement(qualifying.size(), config.holdout_size)) {
      chosen.push_back(qualifying[i]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  out.holdout_vocab = chosen;
  for (const auto& k : chosen) {
    const auto& occ = mined.at(k);
    out.holdout[k] = occ;
    for (const auto& o : occ) out.excluded_utterances.insert(o.utterance_id);
  }
  for (const auto& [k, occ] : mined) {
    if (out.holdout.count(k) != 0 || char_count(k) < mining.min_chars) continue;
    std::vector<KeywordOccurrence> kept;
    for (const auto& o : occ) {
      if (out.excluded_utterances.count(o.utterance_id) == 0) kept.push_back(o);
    }
    if (kept.size() >= mining.min_count) {
      out.vocab.add(k);
      out.pretrain[k] = std::move(kept);
    }
  }
  return out;
}

std::vector<ManifestRow> make_librikws_splits(const std::vector<std::string>& holdout_vocab,
                                              const KeywordMap& holdout, const PoolLookup& pool_of,
                                              const SplitConfig& config) {
  Rng rng(config.seed);
  std::vector<ManifestRow> rows;
  const std::size_t need = config.train_per_keyword + config.dev_per_keyword;
  for (std::size_t ci = 0; ci < holdout_vocab.size(); ++ci) {
    const std::string& k = holdout_vocab[ci];
    auto it = holdout.find(k);
    if (it == holdout.end()) throw DataError("holdout keyword '" + k + "' has no occurrences");
    std::vector<const KeywordOccurrence*> clean;
    std::vector<const KeywordOccurrence*> other;
    for (const auto& o : it->second) {
      const std::string pool = pool_of(o.utterance_id);
      if (pool == "clean") {
        clean.push_back(&o);
      } else if (pool == "other") {
        other.push_back(&o);
      } else {
        throw DataError("utterance " + o.utterance_id + " has unknown pool tag '" + pool + "'");
      }
    }
    if (clean.size() < need) {
      throw DataError("holdout keyword '" + k + "' has " + std::to_string(clean.size()) +
                      " clean occurrences; need " + std::to_string(need));
    }
    rng.shuffle(clean);
    auto emit = [&](const KeywordOccurrence& o, const char* split, const char* pool) {
      rows.push_back(ManifestRow{k, ci, o.utterance_id, o.audio_path, o.start_s, o.end_s, split, pool});
    };
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const char* split = i < config.train_per_keyword ? "train" : (i < need ? "dev" : "test");
      emit(*clean[i], split, "clean");
    }
    for (const auto* o : other) emit(*o, "test", "other");
  }
  return rows;
}

std::vector<ManifestRow> make_pretrain_manifest(const MinedDataset& mined,
                                                const std::optional<KeywordMap>& dev,
                                                double dev_fraction, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ManifestRow> rows;
  for (std::size_t ci = 0; ci < mined.vocab.size(); ++ci) {
    const std::string& k = mined.vocab.keyword(ci);
    const auto& occ = mined.pretrain.at(k);
    auto row = [&](const KeywordOccurrence& o, const char* split) {
      return ManifestRow{k, ci, o.utterance_id, o.audio_path, o.start_s, o.end_s, split, "train"};
    };
    if (dev) {
      for (const auto& o : occ) rows.push_back(row(o, "train"));
      if (auto it = dev->find(k); it != dev->end()) {
        for (const auto& o : it->second) rows.push_back(row(o, "dev"));
      }
      continue;
    }
    std::size_t n_dev = static_cast<std::size_t>(dev_fraction * static_cast<double>(occ.size()));
    n_dev = std::min(n_dev, occ.size() - 1);
    std::vector<bool> is_dev(occ.size(), false);
    for (const std::size_t i : rng.sample_without_replacement(occ.size(), n_dev)) is_dev[i] = true;
    for (std::size_t i = 0; i < occ.size(); ++i) rows.push_back(row(occ[i], is_dev[i] ? "dev" : "train"));
  }
  return rows;
}

}  // namespace kwsem
