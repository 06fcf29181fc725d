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

#ifndef KWSEM_REGISTRY_HPP_
#define KWSEM_REGISTRY_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kwsem/embedder.hpp"
#include "kwsem/features.hpp"
#include "kwsem/fewshot.hpp"

namespace kwsem {

inline constexpr const char* kNegativeLabel = "NEGATIVE";

// One-vs-negative logistic classifier over a frozen embedding.
struct SigmoidClassifier {
  std::string keyword;
  std::size_t order = 0;  // registration index
  std::vector<float> weights;
  float bias = 0.0f;

  std::size_t parameter_count() const { return weights.size() + 1; }
  double confidence(std::span<const float> embedding) const;
  std::uint64_t fingerprint() const;
};

struct RegistrationConfig {
  double learning_rate = 1e-2;
  std::size_t epochs = 500;
};

struct Decision {
  std::optional<std::size_t> index;  // empty for NEGATIVE
  std::string label;
  std::vector<double> confidences;
};

// Threshold rule: NEGATIVE iff every confidence is below the threshold,
// otherwise the maximum, earliest index on ties.
Decision decide(std::span<const double> confidences, std::span<const std::string> keywords,
                double threshold = 0.5);

class KeywordRegistry {
 public:
  explicit KeywordRegistry(double threshold = 0.5);

  double threshold() const { return threshold_; }
  std::size_t size() const { return classifiers_.size(); }
  bool empty() const { return classifiers_.empty(); }
  const std::vector<SigmoidClassifier>& classifiers() const { return classifiers_; }
  std::vector<std::string> keywords() const;
  std::size_t parameter_count() const;
  bool contains(const std::string& keyword) const;

  // Negative embeddings reused by every later registration.
  void set_negative_embeddings(std::vector<std::vector<float>> negatives);
  void cache_negatives(const Embedder<float>& embedder, std::span<const LogMelFrames* const> clips);
  const std::vector<std::vector<float>>& negative_embeddings() const { return negatives_; }

  // Trains and appends one classifier with full-batch Adam on mean BCE
  // (positives 1, cached negatives 0). Returns the final training loss.
  // Throws ConfigError for a duplicate keyword, DataError without positives.
  double register_embeddings(const std::string& keyword,
                             const std::vector<std::vector<float>>& positives,
                             const RegistrationConfig& config = {});
  double register_keyword(const Embedder<float>& embedder, const std::string& keyword,
                          std::span<const LogMelFrames* const> positives,
                          const RegistrationConfig& config = {});

  std::vector<double> confidences(std::span<const float> embedding) const;
  // Throws StateError on an empty registry.
  Decision infer_embedding(std::span<const float> embedding) const;
  Decision infer(const Embedder<float>& embedder, const LogMelFrames& clip) const;

  // Registry as it was after the first n registrations.
  KeywordRegistry prefix(std::size_t n) const;
  std::vector<KeywordRegistry> snapshots() const;

  // REGISTRY checkpoint section payload. Negative cache is not persisted.
  std::vector<unsigned char> encode() const;
  static KeywordRegistry decode(const std::vector<unsigned char>& payload);

 private:
  double threshold_;
  std::vector<SigmoidClassifier> classifiers_;
  std::vector<std::vector<float>> negatives_;
};

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-class scores with 0/0 -> 0.
ClassScore score_class(std::span<const std::string> predicted, std::span<const std::string> truth,
                       const std::string& cls);

struct TimelineEntry {
  std::size_t snapshot = 0;  // 1-based number of registered keywords
  std::string keyword;
  ClassScore score;
};

struct TimelineReport {
  std::vector<TimelineEntry> entries;
  std::vector<double> snapshot_accuracy;
  double final_accuracy = 0.0;
};

// Each snapshot is scored on the test items whose true label is one of its
// registered keywords or NEGATIVE; labels of later keywords are skipped.
TimelineReport evaluate_timeline(std::span<const KeywordRegistry> snapshots,
                                 const std::vector<std::vector<float>>& test_embeddings,
                                 std::span<const std::string> test_labels);

void write_timeline_csv(const std::string& path, const TimelineReport& report);

// Keyword classes in registration order; label == keywords.size() marks a
// negative example.
struct IncrementalTask {
  std::vector<std::string> keywords;
  std::vector<std::vector<float>> train_embeddings;
  std::vector<std::size_t> train_labels;
  std::vector<std::vector<float>> dev_embeddings;
  std::vector<std::size_t> dev_labels;
  std::vector<std::vector<float>> test_embeddings;
  std::vector<std::size_t> test_labels;
};

struct ComparisonReport {
  double sequential_accuracy = 0.0;
  double joint_accuracy = 0.0;
  double gap = 0.0;  // joint - sequential
  KeywordRegistry registry;
  HeadParams joint_head;
  TimelineReport timeline;
};

// Sequential registration against one joint softmax head trained with the
// fix-mode head trainer on identical embeddings.
ComparisonReport compare_sequential_vs_joint(const IncrementalTask& task, std::uint64_t seed,
                                             const RegistrationConfig& registration = {},
                                             const HeadTrainConfig& joint = {});

IncrementalTask embed_incremental_task(const Embedder<float>& embedder,
                                       const std::vector<std::string>& keywords,
                                       const std::vector<LabeledExample>& train,
                                       const std::vector<LabeledExample>& dev,
                                       const std::vector<LabeledExample>& test);

}  // namespace kwsem

#endif  // KWSEM_REGISTRY_HPP_
