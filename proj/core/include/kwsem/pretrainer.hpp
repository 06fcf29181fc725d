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

#ifndef KWSEM_PRETRAINER_HPP_
#define KWSEM_PRETRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kwsem/classifier.hpp"
#include "kwsem/embedder.hpp"
#include "kwsem/features.hpp"
#include "kwsem/vocab.hpp"

namespace kwsem {

struct LabeledExample {
  LogMelFrames features;
  std::size_t label = 0;
  std::string id;
};

struct PretrainConfig {
  double learning_rate = 5e-4;
  std::size_t batch_size = 32;
  std::size_t max_steps = 5000;
  std::size_t eval_every = 250;
  std::uint64_t seed = 0;
  ArchSpec arch;
  // Optional early exit: stop at the first evaluation where dev accuracy
  // reaches target_dev_accuracy and (when > 0) train accuracy reaches
  // target_train_accuracy. 0 disables the corresponding condition; both 0
  // means always run max_steps.
  double target_dev_accuracy = 0.0;
  double target_train_accuracy = 0.0;

  // Throws ConfigError unless every field is positive and eval_every <= max_steps.
  void validate() const;
};

struct HistoryRow {
  std::size_t step = 0;
  double train_loss = 0.0;    // mean batch loss since the previous row (step 0: first batch, pre-update)
  double dev_accuracy = 0.0;
  double train_accuracy = -1.0;  // only computed when a train target is set
};

struct PretrainResult {
  Embedder<float> embedder;
  HeadParams head;
  std::vector<HistoryRow> history;
  std::size_t best_step = 0;
  double best_dev_accuracy = 0.0;
};

// Fraction of examples whose argmax logit (ties -> lowest index) equals the
// label. Throws DataError on an empty set.
double evaluate_classifier(const Embedder<float>& embedder, const HeadParams& head,
                           const std::vector<LabeledExample>& examples);

using ProgressCallback = std::function<void(const HistoryRow&)>;

// Jointly trains a freshly initialised embedder and linear head with
// shuffled mini-batch Adam on mean cross-entropy. Dev accuracy is evaluated
// at step 0 and every eval_every steps; the returned model is the evaluated
// one with the highest dev accuracy (earliest on ties).
// Throws DataError for a class without training examples or an empty dev
// set, TrainingError (with the step) when the loss becomes non-finite.
PretrainResult pretrain(const std::vector<LabeledExample>& train,
                        const std::vector<LabeledExample>& dev, const KeywordVocab& vocab,
                        const PretrainConfig& config, const ProgressCallback& progress = {});

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history);

}  // namespace kwsem

#endif  // KWSEM_PRETRAINER_HPP_
