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

#include "kwsem/pretrainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "kwsem/adam.hpp"
#include "kwsem/error.hpp"
#include "kwsem/manifest.hpp"
#include "kwsem/rng.hpp"

namespace kwsem {

void PretrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || batch_size == 0 || max_steps == 0 || eval_every == 0) {
    throw ConfigError("pretrain: batch_size, max_steps and eval_every must be positive and the learning rate non-negative");
  }
  if (eval_every > max_steps) throw ConfigError("pretrain: eval_every exceeds max_steps");
}

double evaluate_classifier(const Embedder<float>& embedder, const HeadParams& head,
                           const std::vector<LabeledExample>& examples) {
  if (examples.empty()) throw DataError("cannot evaluate on an empty example set");
  std::vector<const LogMelFrames*> items;
  items.reserve(examples.size());
  for (const auto& e : examples) items.push_back(&e.features);
  const auto emb = embed_all(embedder, items);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto logits = head.logits(emb[i]);
    if (argmax<float>(logits) == examples[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

PretrainResult pretrain(const std::vector<LabeledExample>& train,
                        const std::vector<LabeledExample>& dev, const KeywordVocab& vocab,
                        const PretrainConfig& config, const ProgressCallback& progress) {
  config.validate();
  if (vocab.empty()) throw DataError("pretrain: empty vocabulary");
  if (dev.empty()) throw DataError("pretrain: empty dev set");
  std::vector<std::size_t> per_class(vocab.size(), 0);
  for (const auto& e : train) {
    if (e.label >= vocab.size()) {
      throw DataError("pretrain: example " + e.id + " has label " + std::to_string(e.label) +
                      " outside the vocabulary");
    }
    ++per_class[e.label];
  }
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    if (per_class[c] == 0) {
      throw DataError("pretrain: class '" + vocab.keyword(c) + "' has no training examples");
    }
  }

  Rng rng(config.seed);
  const std::uint64_t init_seed = rng.next_u64();
  ClassifierModel<float> model(Embedder<float>::build(config.arch, init_seed),
                               Linear<float>(config.arch.embedding_dim, vocab.size(), "head"));
  auto params = model.parameters();
  std::vector<const Parameter<float>*> cparams(params.begin(), params.end());
  AdamState<float> adam = AdamState<float>::for_parameters(cparams, config.learning_rate);
  LayerGrads<float> grads = model.make_grads();

  const bool check_train = config.target_train_accuracy > 0.0;
  const bool early_exit = check_train || config.target_dev_accuracy > 0.0;

  PretrainResult result{model.embedder(), linear_to_head(model.head(), vocab.keywords()), {}, 0, -1.0};

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();

  double loss_sum = 0.0;
  std::size_t loss_batches = 0;

  auto evaluate = [&](std::size_t step) {
    HistoryRow row;
    row.step = step;
    row.train_loss = loss_batches > 0 ? loss_sum / static_cast<double>(loss_batches) : 0.0;
    const HeadParams head = linear_to_head(model.head(), vocab.keywords());
    row.dev_accuracy = evaluate_classifier(model.embedder(), head, dev);
    if (check_train) row.train_accuracy = evaluate_classifier(model.embedder(), head, train);
    result.history.push_back(row);
    if (progress) progress(row);
    if (row.dev_accuracy > result.best_dev_accuracy) {
      result.best_dev_accuracy = row.dev_accuracy;
      result.best_step = step;
      result.embedder = model.embedder();
      result.head = head;
    }
    // Row 0 reports the first batch alone; later rows average every batch
    // since the previous row, so the first batch is also counted again.
    if (step != 0) {
      loss_sum = 0.0;
      loss_batches = 0;
    }
    if (!early_exit) return false;
    const bool dev_ok = row.dev_accuracy >= config.target_dev_accuracy;
    const bool train_ok = !check_train || row.train_accuracy >= config.target_train_accuracy;
    return dev_ok && train_ok;
  };

  std::vector<const LogMelFrames*> batch_items;
  std::vector<std::size_t> batch_labels;
  for (std::size_t step = 0; step < config.max_steps; ++step) {
    batch_items.clear();
    batch_labels.clear();
    while (batch_items.size() < std::min(config.batch_size, train.size())) {
      if (cursor == order.size()) {
        rng.shuffle(order);
        cursor = 0;
      }
      const auto& e = train[order[cursor++]];
      batch_items.push_back(&e.features);
      batch_labels.push_back(e.label);
    }
    const Tensor4<float> x = make_feature_batch<float>(batch_items);
    grads.zero();
    const float loss = model.loss_and_grad(x, batch_labels, grads);
    if (!std::isfinite(loss)) {
      throw TrainingError("pretrain: loss became non-finite at step " + std::to_string(step));
    }
    loss_sum += loss;
    ++loss_batches;
    if (step == 0 && evaluate(0)) break;
    adam_step<float>(params, grads, adam);
    const std::size_t done = step + 1;
    if (done % config.eval_every == 0 || done == config.max_steps) {
      if (evaluate(done)) break;
    }
  }
  return result;
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "step,train_loss,dev_accuracy\n";
  for (const auto& r : history) {
    out << r.step << ',' << format_double(r.train_loss) << ',' << format_double(r.dev_accuracy) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kwsem
