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

#include "kwsem/fewshot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "kwsem/adam.hpp"
#include "kwsem/error.hpp"
#include "kwsem/loss.hpp"
#include "kwsem/rng.hpp"

namespace kwsem {

std::string to_string(HeadMode mode) {
  switch (mode) {
    case HeadMode::fix:
      return "fix";
    case HeadMode::finetune:
      return "finetune";
    case HeadMode::random_init:
      return "random_init";
  }
  return "unknown";
}

HeadMode parse_head_mode(const std::string& text) {
  if (text == "fix") return HeadMode::fix;
  if (text == "finetune" || text == "ft") return HeadMode::finetune;
  if (text == "random_init" || text == "rand") return HeadMode::random_init;
  throw ConfigError("unknown head mode '" + text + "' (expected fix, finetune or random_init)");
}

void FewShotTask::validate() const {
  if (classes.empty()) throw ConfigError("task has no classes");
  if (k == 0) throw ConfigError("task k must be at least 1");
  if (!negative_words.empty() && k_neg == 0) throw ConfigError("task k_neg must be at least 1");
  std::set<std::string> seen;
  for (const auto& c : classes) {
    if (!seen.insert(c).second) throw ConfigError("class listed twice: " + c);
  }
  for (const auto& w : negative_words) {
    if (!seen.insert(w).second) throw ConfigError("word listed twice: " + w);
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("task key '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
}

}  // namespace

FewShotTask parse_task(const std::string& text) {
  FewShotTask task;
  bool have_seed = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("task line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "classes") {
      task.classes = split_list(value);
    } else if (key == "negative") {
      task.negative_words = split_list(value);
    } else if (key == "k") {
      task.k = parse_u64(key, value);
    } else if (key == "k_neg") {
      task.k_neg = parse_u64(key, value);
    } else if (key == "mode") {
      task.mode = parse_head_mode(value);
    } else if (key == "seed") {
      task.seed = parse_u64(key, value);
      have_seed = true;
    } else {
      throw ParseError("task line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!have_seed) throw ConfigError("task file must set an explicit seed");
  task.validate();
  return task;
}

FewShotTask load_task_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_task(ss.str());
}

ClassedManifest group_negative(const std::vector<ManifestRow>& rows,
                               const std::set<std::string>& negative_words) {
  // Original class order by class_index.
  std::map<std::size_t, std::string> by_index;
  std::set<std::string> present;
  for (const auto& r : rows) {
    by_index.emplace(r.class_index, r.keyword);
    present.insert(r.keyword);
  }
  for (const auto& w : negative_words) {
    if (present.count(w) == 0) throw ConfigError("negative word '" + w + "' not in manifest");
  }
  ClassedManifest out;
  std::map<std::string, std::size_t> remap;
  for (const auto& [idx, name] : by_index) {
    if (negative_words.count(name) != 0 || remap.count(name) != 0) continue;
    remap[name] = out.class_names.size();
    out.class_names.push_back(name);
  }
  if (!negative_words.empty()) {
    out.negative_index = out.class_names.size();
    out.class_names.push_back(kNegativeClass);
  }
  out.rows = rows;
  for (auto& r : out.rows) {
    r.class_index = negative_words.count(r.keyword) != 0 ? *out.negative_index : remap.at(r.keyword);
  }
  return out;
}

ClassedManifest select_task_classes(const std::vector<ManifestRow>& rows, const FewShotTask& task) {
  task.validate();
  std::set<std::string> present;
  for (const auto& r : rows) present.insert(r.keyword);
  std::map<std::string, std::size_t> positive;
  for (std::size_t i = 0; i < task.classes.size(); ++i) {
    if (present.count(task.classes[i]) == 0) {
      throw ConfigError("task class '" + task.classes[i] + "' not in manifest");
    }
    positive[task.classes[i]] = i;
  }
  const std::set<std::string> negative(task.negative_words.begin(), task.negative_words.end());
  std::vector<ManifestRow> kept;
  for (const auto& r : rows) {
    if (auto it = positive.find(r.keyword); it != positive.end()) {
      kept.push_back(r);
      kept.back().class_index = it->second;
    } else if (negative.count(r.keyword) != 0) {
      kept.push_back(r);
      kept.back().class_index = task.classes.size();
    }
  }
  ClassedManifest out = group_negative(kept, negative);
  out.class_names = task.classes;
  if (!negative.empty()) out.class_names.push_back(kNegativeClass);
  return out;
}

std::vector<ManifestRow> sample_kshot(const ClassedManifest& manifest, const FewShotTask& task,
                                      const std::string& split) {
  Rng rng(task.seed);
  std::vector<std::vector<const ManifestRow*>> by_class(manifest.class_names.size());
  for (const auto& r : manifest.rows) {
    if (r.split != split) continue;
    if (r.class_index >= by_class.size()) {
      throw DataError("row for '" + r.keyword + "' has class index beyond the class list");
    }
    by_class[r.class_index].push_back(&r);
  }
  std::vector<ManifestRow> out;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const bool negative = manifest.negative_index && *manifest.negative_index == c;
    const std::size_t want = negative ? task.k_neg : task.k;
    auto& pool = by_class[c];
    if (pool.size() < want) {
      throw DataError("class '" + manifest.class_names[c] + "' has " + std::to_string(pool.size()) +
                      " " + split + " examples; need " + std::to_string(want));
    }
    if (!negative) {
      for (const std::size_t i : rng.sample_without_replacement(pool.size(), want)) out.push_back(*pool[i]);
      continue;
    }
    // Round-robin over the constituent words in a seeded order.
    std::map<std::string, std::vector<const ManifestRow*>> words;
    for (const auto* r : pool) words[r->keyword].push_back(r);
    std::vector<std::vector<const ManifestRow*>> queues;
    for (auto& [w, rows] : words) {
      rng.shuffle(rows);
      queues.push_back(rows);
    }
    rng.shuffle(queues);
    std::vector<std::size_t> next(queues.size(), 0);
    std::size_t taken = 0;
    while (taken < want) {
      for (std::size_t q = 0; q < queues.size() && taken < want; ++q) {
        if (next[q] < queues[q].size()) {
          out.push_back(*queues[q][next[q]++]);
          ++taken;
        }
      }
    }
  }
  return out;
}

namespace {

Tensor4<float> embedding_batch(const std::vector<std::vector<float>>& emb,
                               std::span<const std::size_t> idx, std::size_t dim) {
  Tensor4<float> x(Shape4{idx.size(), dim, 1, 1});
  for (std::size_t b = 0; b < idx.size(); ++b) {
    const auto& e = emb[idx[b]];
    if (e.size() != dim) throw ShapeError("embedding dimension mismatch");
    std::copy(e.begin(), e.end(), x.data() + b * dim);
  }
  return x;
}

struct DevScore {
  double accuracy = 0.0;
  double loss = 0.0;
};

bool improves(const DevScore& s, double best_acc, double best_loss) {
  return s.accuracy > best_acc || (s.accuracy == best_acc && s.loss < best_loss - 1e-4);
}

DevScore score_logits(const Tensor4<float>& logits, std::span<const std::size_t> labels) {
  DevScore s;
  const std::size_t classes = logits.shape().channels;
  std::size_t correct = 0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    std::span<const float> row(logits.data() + b * classes, classes);
    if (argmax<float>(row) == labels[b]) ++correct;
  }
  s.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  s.loss = batch_cross_entropy(logits, labels, static_cast<Tensor4<float>*>(nullptr));
  return s;
}

void check_labels(std::span<const std::size_t> labels, std::size_t num_classes) {
  for (const std::size_t l : labels) {
    if (l >= num_classes) {
      throw DataError("label " + std::to_string(l) + " outside " + std::to_string(num_classes) + " classes");
    }
  }
}

}  // namespace

HeadTrainResult train_linear_head(const std::vector<std::vector<float>>& train_embeddings,
                                  std::span<const std::size_t> train_labels,
                                  const std::vector<std::vector<float>>& dev_embeddings,
                                  std::span<const std::size_t> dev_labels, std::size_t num_classes,
                                  double learning_rate, const HeadTrainConfig& config,
                                  std::uint64_t seed) {
  if (train_embeddings.empty()) throw DataError("head training needs at least one example");
  if (train_embeddings.size() != train_labels.size() || dev_embeddings.size() != dev_labels.size()) {
    throw ShapeError("embedding and label counts differ");
  }
  check_labels(train_labels, num_classes);
  check_labels(dev_labels, num_classes);
  const std::size_t dim = train_embeddings.front().size();
  Rng rng(seed);
  const HeadParams init = config.random_head_init
                              ? HeadParams::random_uniform(num_classes, dim, rng.next_u64())
                              : HeadParams::zeros(num_classes, dim);
  Linear<float> head = head_to_linear<float>(init);
  auto params = head.parameters();
  std::vector<const Parameter<float>*> cparams(params.begin(), params.end());
  AdamState<float> adam = AdamState<float>::for_parameters(cparams, learning_rate);
  LayerGrads<float> grads = LayerGrads<float>::for_parameters(cparams);
  std::vector<std::vector<float>*> slots = {&*grads.buffers[0], &*grads.buffers[1]};

  // An empty dev set falls back to the training set.
  const bool own_dev = !dev_embeddings.empty();
  const auto& dev_e = own_dev ? dev_embeddings : train_embeddings;
  const auto dev_l = own_dev ? dev_labels : train_labels;
  std::vector<std::size_t> dev_idx(dev_e.size());
  for (std::size_t i = 0; i < dev_idx.size(); ++i) dev_idx[i] = i;
  const Tensor4<float> dev_x = embedding_batch(dev_e, dev_idx, dim);

  HeadTrainResult result;
  result.trainable_parameters = init.parameter_count();
  DevScore s0 = score_logits(head.forward(dev_x), dev_l);
  result.history.push_back({0, 0.0, s0.accuracy, s0.loss});
  result.head = linear_to_head(head);
  result.best_dev_accuracy = s0.accuracy;
  double best_loss = s0.loss;
  std::size_t stale = 0;

  std::vector<std::size_t> order(train_embeddings.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::size_t> labels;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += config.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + config.batch_size);
      std::span<const std::size_t> idx(order.data() + lo, hi - lo);
      const Tensor4<float> x = embedding_batch(train_embeddings, idx, dim);
      labels.assign(idx.size(), 0);
      for (std::size_t b = 0; b < idx.size(); ++b) labels[b] = train_labels[idx[b]];
      const Tensor4<float> logits = head.forward(x);
      Tensor4<float> dlogits;
      const float loss = batch_cross_entropy(logits, labels, &dlogits);
      if (!std::isfinite(loss)) {
        throw TrainingError("head training: non-finite loss at epoch " + std::to_string(epoch));
      }
      grads.zero();
      head.backward(x, logits, dlogits, slots, false);
      adam_step<float>(params, grads, adam);
      loss_sum += loss;
      ++batches;
    }
    const DevScore s = score_logits(head.forward(dev_x), dev_l);
    result.history.push_back({epoch, loss_sum / static_cast<double>(batches), s.accuracy, s.loss});
    if (improves(s, result.best_dev_accuracy, best_loss)) {
      result.best_dev_accuracy = s.accuracy;
      best_loss = s.loss;
      result.best_epoch = epoch;
      result.head = linear_to_head(head);
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

namespace {

HeadTrainResult train_full(Embedder<float> embedder, const std::vector<LabeledExample>& train,
                           const std::vector<LabeledExample>& dev, std::size_t num_classes,
                           double learning_rate, std::uint64_t seed, const HeadTrainConfig& config) {
  Rng rng(seed);
  embedder.set_frozen(false);
  const std::size_t dim = embedder.spec().embedding_dim;
  const HeadParams init = config.random_head_init
                              ? HeadParams::random_uniform(num_classes, dim, rng.next_u64())
                              : HeadParams::zeros(num_classes, dim);
  ClassifierModel<float> model(std::move(embedder), head_to_linear<float>(init));
  auto params = model.parameters();
  std::vector<const Parameter<float>*> cparams(params.begin(), params.end());
  AdamState<float> adam = AdamState<float>::for_parameters(cparams, learning_rate);
  LayerGrads<float> grads = model.make_grads();

  const auto& dev_set = dev.empty() ? train : dev;
  std::vector<std::size_t> dev_labels;
  for (const auto& e : dev_set) dev_labels.push_back(e.label);
  auto dev_score = [&]() {
    Tensor4<float> logits(Shape4{dev_set.size(), num_classes, 1, 1});
    constexpr std::size_t kChunk = 16;
    for (std::size_t lo = 0; lo < dev_set.size(); lo += kChunk) {
      const std::size_t hi = std::min(dev_set.size(), lo + kChunk);
      std::vector<const LogMelFrames*> items;
      for (std::size_t i = lo; i < hi; ++i) items.push_back(&dev_set[i].features);
      const Tensor4<float> part = model.logits(make_feature_batch<float>(items));
      std::copy(part.data(), part.data() + part.size(), logits.data() + lo * num_classes);
    }
    return score_logits(logits, dev_labels);
  };

  HeadTrainResult result;
  result.trainable_parameters = model.embedder().parameter_count() + init.parameter_count();
  DevScore s0 = dev_score();
  result.history.push_back({0, 0.0, s0.accuracy, s0.loss});
  result.head = linear_to_head(model.head());
  result.embedder = model.embedder();
  result.best_dev_accuracy = s0.accuracy;
  double best_loss = s0.loss;
  std::size_t stale = 0;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += config.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + config.batch_size);
      std::vector<const LogMelFrames*> items;
      std::vector<std::size_t> labels;
      for (std::size_t i = lo; i < hi; ++i) {
        items.push_back(&train[order[i]].features);
        labels.push_back(train[order[i]].label);
      }
      grads.zero();
      const float loss = model.loss_and_grad(make_feature_batch<float>(items), labels, grads);
      if (!std::isfinite(loss)) {
        throw TrainingError("head training: non-finite loss at epoch " + std::to_string(epoch));
      }
      adam_step<float>(params, grads, adam);
      loss_sum += loss;
      ++batches;
    }
    const DevScore s = dev_score();
    result.history.push_back({epoch, loss_sum / static_cast<double>(batches), s.accuracy, s.loss});
    if (improves(s, result.best_dev_accuracy, best_loss)) {
      result.best_dev_accuracy = s.accuracy;
      best_loss = s.loss;
      result.best_epoch = epoch;
      result.head = linear_to_head(model.head());
      result.embedder = model.embedder();
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace

HeadTrainResult train_head(const Embedder<float>& embedder, const std::vector<LabeledExample>& train,
                           const std::vector<LabeledExample>& dev, std::size_t num_classes,
                           HeadMode mode, std::uint64_t seed, const HeadTrainConfig& config) {
  if (train.empty()) throw DataError("head training needs at least one example");
  if (num_classes == 0) throw ConfigError("head training needs at least one class");
  switch (mode) {
    case HeadMode::fix: {
      std::vector<const LogMelFrames*> tr;
      std::vector<std::size_t> tl;
      for (const auto& e : train) {
        tr.push_back(&e.features);
        tl.push_back(e.label);
      }
      std::vector<const LogMelFrames*> dv;
      std::vector<std::size_t> dl;
      for (const auto& e : dev) {
        dv.push_back(&e.features);
        dl.push_back(e.label);
      }
      return train_linear_head(embed_all(embedder, tr), tl, embed_all(embedder, dv), dl,
                               num_classes, config.lr_fix, config, seed);
    }
    case HeadMode::finetune:
      return train_full(embedder, train, dev, num_classes, config.lr_finetune, seed, config);
    case HeadMode::random_init: {
      Rng rng(seed);
      return train_full(Embedder<float>::build(embedder.spec(), rng.next_u64()), train, dev,
                        num_classes, config.lr_random_init, rng.next_u64(), config);
    }
  }
  throw ConfigError("unknown head mode");
}

Prediction predict_embedding(const HeadParams& head, std::span<const float> embedding) {
  Prediction p;
  const auto logits = head.logits(embedding);
  p.probabilities = softmax<float>(logits);
  p.label = argmax<float>(logits);
  return p;
}

Prediction predict(const Embedder<float>& embedder, const HeadParams& head,
                   const LogMelFrames& features) {
  return predict_embedding(head, embedder.embed(features));
}

std::vector<Prediction> predict_batch(const Embedder<float>& embedder, const HeadParams& head,
                                      std::span<const LogMelFrames* const> items) {
  const auto emb = embed_all(embedder, items);
  std::vector<Prediction> out;
  out.reserve(emb.size());
  for (const auto& e : emb) out.push_back(predict_embedding(head, e));
  return out;
}

}  // namespace kwsem
