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

#ifndef KWSEM_VOCAB_HPP_
#define KWSEM_VOCAB_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "kwsem/error.hpp"

namespace kwsem {

// Bijective keyword <-> dense class index map.
class KeywordVocab {
 public:
  KeywordVocab() = default;
  explicit KeywordVocab(const std::vector<std::string>& keywords) {
    for (const auto& k : keywords) add(k);
  }

  // Returns the existing index when the keyword is already present.
  std::size_t add(const std::string& keyword) {
    auto [it, inserted] = index_.try_emplace(keyword, keywords_.size());
    if (inserted) keywords_.push_back(keyword);
    return it->second;
  }

  bool contains(const std::string& keyword) const { return index_.count(keyword) != 0; }

  std::size_t index_of(const std::string& keyword) const {
    auto it = index_.find(keyword);
    if (it == index_.end()) throw IndexError("keyword not in vocabulary: " + keyword);
    return it->second;
  }

  const std::string& keyword(std::size_t index) const {
    if (index >= keywords_.size()) throw IndexError("class index out of range: " + std::to_string(index));
    return keywords_[index];
  }

  std::size_t size() const { return keywords_.size(); }
  bool empty() const { return keywords_.empty(); }
  const std::vector<std::string>& keywords() const { return keywords_; }

 private:
  std::vector<std::string> keywords_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace kwsem

#endif  // KWSEM_VOCAB_HPP_
