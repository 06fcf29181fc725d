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

#ifndef KWSEM_FEWSHOT_HPP_
#define KWSEM_FEWSHOT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kwsem/classifier.hpp"
#include "kwsem/embedder.hpp"
#include "kwsem/manifest.hpp"
#include "kwsem/pretrainer.hpp"

namespace kwsem {

// fix: frozen embedder, train the head only. finetune: train both.
// random_init: re-initialise the embedder from the task seed, then train both.
enum class HeadMode { fix, finetune, random_init };

std::string to_string(HeadMode mode);
HeadMode parse_head_mode(const std::string& text);

inline constexpr const char* kNegativeClass = "negative";

struct FewShotTask {
  std::vector<std::string> classes;         // keyword classes, in class-index order
  std::vector<std::string> negative_words;  // grouped into one trailing negative class
  std::size_t k = 5;
  std::size_t k_neg = 15;
  HeadMode mode = HeadMode::fix;
  std::uint64_t seed = 0;

  void validate() const;
};

// Key-value task file, one `key = value` per line, '#' comments:
//   classes = yes,no,up
//   negative = bed,bird,cat      (optional)
//   k = 5
//   k_neg = 15
//   mode = fix|finetune|random_init
//   seed = 1
FewShotTask parse_task(const std::string& text);
FewShotTask load_task_file(const std::string& path);

// Manifest rows with a dense class list; the negative class (if any) is last.
struct ClassedManifest {
  std::vector<ManifestRow> rows;
  std::vector<std::string> class_names;
  std::optional<std::size_t> negative_index;
};

// Rows whose keyword is in `negative_words` are relabelled to a single
// trailing negative class; the other classes keep their relative order and
// are re-indexed densely. Throws ConfigError for a word not in the manifest.
ClassedManifest group_negative(const std::vector<ManifestRow>& rows,
                               const std::set<std::string>& negative_words);

// Restricts to the task's classes (plus negative words) and groups them.
ClassedManifest select_task_classes(const std::vector<ManifestRow>& rows, const FewShotTask& task);

// Seeded sampling without replacement of `split` rows: task.k per keyword
// class, task.k_neg for the negative class drawn round-robin across its
// constituent words. Throws DataError naming an under-populated class.
std::vector<ManifestRow> sample_kshot(const ClassedManifest& manifest, const FewShotTask& task,
                                      const std::string& split = "train");

struct HeadTrainConfig {
  double lr_fix = 1e-3;
  double lr_finetune = 1e-4;
  double lr_random_init = 5e-4;
  std::size_t max_epochs = 1000;
  std::size_t patience = 20;
  std::size_t batch_size = 32;
  // Zero head init unless set.
  bool random_head_init = false;
};

struct HeadEpoch {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
  double dev_loss = 0.0;
};

struct HeadTrainResult {
  HeadParams head;
  std::optional<Embedder<float>> embedder;  // set for finetune / random_init
  std::vector<HeadEpoch> history;
  std::size_t best_epoch = 0;
  double best_dev_accuracy = 0.0;

  std::size_t trainable_parameters = 0;
};

// Softmax head on fixed embeddings: mini-batch Adam, early stopping on dev
// accuracy (dev loss breaks ties) with `patience` evaluations.
HeadTrainResult train_linear_head(const std::vector<std::vector<float>>& train_embeddings,
                                  std::span<const std::size_t> train_labels,
                                  const std::vector<std::vector<float>>& dev_embeddings,
                                  std::span<const std::size_t> dev_labels, std::size_t num_classes,
                                  double learning_rate, const HeadTrainConfig& config,
                                  std::uint64_t seed);

// Downstream training for a task. In fix mode the embedder is never
// modified; in the other modes the trained copy is returned in the result.
HeadTrainResult train_head(const Embedder<float>& embedder, const std::vector<LabeledExample>& train,
                           const std::vector<LabeledExample>& dev, std::size_t num_classes,
                           HeadMode mode, std::uint64_t seed, const HeadTrainConfig& config = {});

struct Prediction {
  std::size_t label = 0;
  std::vector<float> probabilities;
};

Prediction predict(const Embedder<float>& embedder, const HeadParams& head,
                   const LogMelFrames& features);
std::vector<Prediction> predict_batch(const Embedder<float>& embedder, const HeadParams& head,
                                      std::span<const LogMelFrames* const> items);
Prediction predict_embedding(const HeadParams& head, std::span<const float> embedding);

}  // namespace kwsem

#endif  // KWSEM_FEWSHOT_HPP_
