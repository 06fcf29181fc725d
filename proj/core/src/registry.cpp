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

#include "kwsem/registry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "binary_io.hpp"
#include "kwsem/adam.hpp"
#include "kwsem/error.hpp"
#include "kwsem/loss.hpp"
#include "kwsem/manifest.hpp"

namespace kwsem {

namespace {

constexpr std::uint32_t kRegistryFormat = 1;

double dot(std::span<const float> w, std::span<const float> e) {
  if (w.size() != e.size()) {
    throw ShapeError("embedding has " + std::to_string(e.size()) + " values, classifier expects " +
                     std::to_string(w.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += static_cast<double>(w[i]) * e[i];
  return s;
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double SigmoidClassifier::confidence(std::span<const float> embedding) const {
  return sigmoid<double>(dot(weights, embedding) + bias);
}

std::uint64_t SigmoidClassifier::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(keyword.data(), keyword.size(), h);
  h = fnv1a(weights.data(), weights.size() * sizeof(float), h);
  return fnv1a(&bias, sizeof(bias), h);
}

Decision decide(std::span<const double> confidences, std::span<const std::string> keywords,
                double threshold) {
  if (confidences.size() != keywords.size()) throw ShapeError("confidence and keyword counts differ");
  if (confidences.empty()) throw StateError("no registered keywords");
  Decision d;
  d.confidences.assign(confidences.begin(), confidences.end());
  std::size_t best = 0;
  for (std::size_t i = 1; i < confidences.size(); ++i) {
    if (confidences[i] > confidences[best]) best = i;
  }
  if (confidences[best] < threshold) {
    d.label = kNegativeLabel;
  } else {
    d.index = best;
    d.label = keywords[best];
  }
  return d;
}

KeywordRegistry::KeywordRegistry(double threshold) : threshold_(threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("registry threshold must be in (0, 1)");
}

std::vector<std::string> KeywordRegistry::keywords() const {
  std::vector<std::string> out;
  for (const auto& c : classifiers_) out.push_back(c.keyword);
  return out;
}

std::size_t KeywordRegistry::parameter_count() const {
  std::size_t n = 0;
  for (const auto& c : classifiers_) n += c.parameter_count();
  return n;
}

bool KeywordRegistry::contains(const std::string& keyword) const {
  return std::any_of(classifiers_.begin(), classifiers_.end(),
                     [&](const SigmoidClassifier& c) { return c.keyword == keyword; });
}

void KeywordRegistry::set_negative_embeddings(std::vector<std::vector<float>> negatives) {
  for (const auto& n : negatives) {
    if (n.size() != negatives.front().size()) throw ShapeError("negative embeddings differ in size");
  }
  negatives_ = std::move(negatives);
}

void KeywordRegistry::cache_negatives(const Embedder<float>& embedder,
                                      std::span<const LogMelFrames* const> clips) {
  set_negative_embeddings(embed_all(embedder, clips));
}

double KeywordRegistry::register_embeddings(const std::string& keyword,
                                            const std::vector<std::vector<float>>& positives,
                                            const RegistrationConfig& config) {
  if (keyword.empty() || keyword == kNegativeLabel) throw ConfigError("invalid keyword name '" + keyword + "'");
  if (contains(keyword)) throw ConfigError("keyword already registered: " + keyword);
  if (positives.empty()) throw DataError("registration of '" + keyword + "' needs at least one positive clip");
  if (config.epochs == 0 || !(config.learning_rate >= 0.0)) throw ConfigError("invalid registration config");
  const std::size_t dim = positives.front().size();
  if (!classifiers_.empty() && classifiers_.front().weights.size() != dim) {
    throw ShapeError("embedding dimension differs from earlier registrations");
  }

  std::vector<const std::vector<float>*> xs;
  std::vector<int> ys;
  for (const auto& p : positives) {
    if (p.size() != dim) throw ShapeError("positive embeddings differ in size");
    xs.push_back(&p);
    ys.push_back(1);
  }
  for (const auto& n : negatives_) {
    if (n.size() != dim) throw ShapeError("negative embedding dimension mismatch");
    xs.push_back(&n);
    ys.push_back(0);
  }

  Parameter<double> w{"weight", {dim}, std::vector<double>(dim, 0.0)};
  Parameter<double> b{"bias", {1}, {0.0}};
  std::vector<Parameter<double>*> params = {&w, &b};
  std::vector<const Parameter<double>*> cparams = {&w, &b};
  AdamState<double> adam = AdamState<double>::for_parameters(cparams, config.learning_rate);
  LayerGrads<double> grads = LayerGrads<double>::for_parameters(cparams);
  const double inv_n = 1.0 / static_cast<double>(xs.size());

  auto evaluate = [&](bool with_grad) {
    double loss = 0.0;
    auto& gw = *grads.buffers[0];
    auto& gb = *grads.buffers[1];
    if (with_grad) grads.zero();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto& x = *xs[i];
      double z = b.values[0];
      for (std::size_t j = 0; j < dim; ++j) z += w.values[j] * x[j];
      const BinaryLoss l = sigmoid_bce<double>(z, ys[i]);
      loss += l.loss;
      if (with_grad) {
        const double g = l.grad * inv_n;
        for (std::size_t j = 0; j < dim; ++j) gw[j] += g * x[j];
        gb[0] += g;
      }
    }
    return loss * inv_n;
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = evaluate(true);
    if (!std::isfinite(loss)) throw TrainingError("registration of '" + keyword + "': non-finite loss");
    adam_step<double>(params, grads, adam);
  }

  SigmoidClassifier c;
  c.keyword = keyword;
  c.order = classifiers_.size();
  c.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) c.weights[j] = static_cast<float>(w.values[j]);
  c.bias = static_cast<float>(b.values[0]);
  // Report the loss of the stored (float) parameters.
  for (std::size_t j = 0; j < dim; ++j) w.values[j] = c.weights[j];
  b.values[0] = c.bias;
  const double final_loss = evaluate(false);
  classifiers_.push_back(std::move(c));
  return final_loss;
}

double KeywordRegistry::register_keyword(const Embedder<float>& embedder, const std::string& keyword,
                                         std::span<const LogMelFrames* const> positives,
                                         const RegistrationConfig& config) {
  if (!embedder.frozen()) throw StateError("registration requires a frozen embedder");
  return register_embeddings(keyword, embed_all(embedder, positives), config);
}

std::vector<double> KeywordRegistry::confidences(std::span<const float> embedding) const {
  std::vector<double> out;
  out.reserve(classifiers_.size());
  for (const auto& c : classifiers_) out.push_back(c.confidence(embedding));
  return out;
}

Decision KeywordRegistry::infer_embedding(std::span<const float> embedding) const {
  if (classifiers_.empty()) throw StateError("inference on an empty registry");
  const auto conf = confidences(embedding);
  const auto names = keywords();
  return decide(conf, names, threshold_);
}

Decision KeywordRegistry::infer(const Embedder<float>& embedder, const LogMelFrames& clip) const {
  if (classifiers_.empty()) throw StateError("inference on an empty registry");
  return infer_embedding(embedder.embed(clip));
}

KeywordRegistry KeywordRegistry::prefix(std::size_t n) const {
  if (n > classifiers_.size()) throw IndexError("registry prefix beyond its size");
  KeywordRegistry r(threshold_);
  r.classifiers_.assign(classifiers_.begin(), classifiers_.begin() + static_cast<std::ptrdiff_t>(n));
  return r;
}

std::vector<KeywordRegistry> KeywordRegistry::snapshots() const {
  std::vector<KeywordRegistry> out;
  for (std::size_t n = 1; n <= classifiers_.size(); ++n) out.push_back(prefix(n));
  return out;
}

std::vector<unsigned char> KeywordRegistry::encode() const {
  detail::ByteWriter w;
  w.put<std::uint32_t>(kRegistryFormat);
  w.put<double>(threshold_);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(classifiers_.size()));
  for (const auto& c : classifiers_) {
    w.put_string(c.keyword);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(c.weights.size()));
    w.put_floats(c.weights);
    w.put<float>(c.bias);
  }
  return std::move(w.bytes());
}

KeywordRegistry KeywordRegistry::decode(const std::vector<unsigned char>& payload) {
  detail::ByteReader r(payload, "REGISTRY section");
  const auto format = r.get<std::uint32_t>();
  if (format != kRegistryFormat) throw FormatError("REGISTRY section: unsupported format " + std::to_string(format));
  KeywordRegistry reg(r.get<double>());
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    SigmoidClassifier c;
    c.keyword = r.get_string();
    c.order = i;
    c.weights = r.get_floats(r.get<std::uint32_t>());
    c.bias = r.get<float>();
    reg.classifiers_.push_back(std::move(c));
  }
  if (r.remaining() != 0) throw FormatError("REGISTRY section: trailing bytes");
  return reg;
}

ClassScore score_class(std::span<const std::string> predicted, std::span<const std::string> truth,
                       const std::string& cls) {
  if (predicted.size() != truth.size()) throw ShapeError("prediction and label counts differ");
  std::size_t tp = 0, pred = 0, actual = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == cls;
    const bool t = truth[i] == cls;
    tp += p && t;
    pred += p;
    actual += t;
  }
  ClassScore s;
  s.precision = pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(pred);
  s.recall = actual == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(actual);
  const double denom = s.precision + s.recall;
  s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  return s;
}

TimelineReport evaluate_timeline(std::span<const KeywordRegistry> snapshots,
                                 const std::vector<std::vector<float>>& test_embeddings,
                                 std::span<const std::string> test_labels) {
  if (test_embeddings.size() != test_labels.size()) throw ShapeError("test embedding and label counts differ");
  TimelineReport report;
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    const auto& reg = snapshots[s];
    const auto names = reg.keywords();
    std::vector<std::string> pred, truth;
    for (std::size_t i = 0; i < test_labels.size(); ++i) {
      const bool known = test_labels[i] == kNegativeLabel ||
                         std::find(names.begin(), names.end(), test_labels[i]) != names.end();
      if (!known) continue;
      pred.push_back(reg.infer_embedding(test_embeddings[i]).label);
      truth.push_back(test_labels[i]);
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
    report.snapshot_accuracy.push_back(
        pred.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(pred.size()));
    for (const auto& k : names) report.entries.push_back({reg.size(), k, score_class(pred, truth, k)});
  }
  if (!report.snapshot_accuracy.empty()) report.final_accuracy = report.snapshot_accuracy.back();
  return report;
}

void write_timeline_csv(const std::string& path, const TimelineReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "snapshot,class,precision,recall,f1\n";
  for (const auto& e : report.entries) {
    out << e.snapshot << ',' << csv_field(e.keyword) << ',' << format_double(e.score.precision) << ','
        << format_double(e.score.recall) << ',' << format_double(e.score.f1) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

ComparisonReport compare_sequential_vs_joint(const IncrementalTask& task, std::uint64_t seed,
                                             const RegistrationConfig& registration,
                                             const HeadTrainConfig& joint) {
  const std::size_t k = task.keywords.size();
  if (k == 0) throw ConfigError("incremental task has no keywords");
  if (task.test_embeddings.empty()) throw DataError("incremental task has no test examples");
  if (task.train_embeddings.size() != task.train_labels.size() ||
      task.test_embeddings.size() != task.test_labels.size()) {
    throw ShapeError("embedding and label counts differ");
  }

  ComparisonReport report;
  std::vector<std::vector<std::vector<float>>> positives(k);
  std::vector<std::vector<float>> negatives;
  for (std::size_t i = 0; i < task.train_labels.size(); ++i) {
    const std::size_t l = task.train_labels[i];
    if (l > k) throw DataError("train label outside the task classes");
    (l == k ? negatives : positives[l]).push_back(task.train_embeddings[i]);
  }
  report.registry.set_negative_embeddings(negatives);
  for (std::size_t c = 0; c < k; ++c) report.registry.register_embeddings(task.keywords[c], positives[c], registration);

  std::vector<std::string> label_names = task.keywords;
  label_names.push_back(kNegativeLabel);
  std::vector<std::string> truth;
  for (const std::size_t l : task.test_labels) {
    if (l > k) throw DataError("test label outside the task classes");
    truth.push_back(label_names[l]);
  }
  const auto snaps = report.registry.snapshots();
  report.timeline = evaluate_timeline(snaps, task.test_embeddings, truth);
  report.sequential_accuracy = report.timeline.final_accuracy;

  const HeadTrainResult head = train_linear_head(task.train_embeddings, task.train_labels,
                                                 task.dev_embeddings, task.dev_labels, k + 1,
                                                 joint.lr_fix, joint, seed);
  report.joint_head = head.head;
  report.joint_head.labels = label_names;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < task.test_embeddings.size(); ++i) {
    correct += predict_embedding(head.head, task.test_embeddings[i]).label == task.test_labels[i];
  }
  report.joint_accuracy = static_cast<double>(correct) / static_cast<double>(task.test_embeddings.size());
  report.gap = report.joint_accuracy - report.sequential_accuracy;
  return report;
}

IncrementalTask embed_incremental_task(const Embedder<float>& embedder,
                                       const std::vector<std::string>& keywords,
                                       const std::vector<LabeledExample>& train,
                                       const std::vector<LabeledExample>& dev,
                                       const std::vector<LabeledExample>& test) {
  IncrementalTask task;
  task.keywords = keywords;
  auto fill = [&](const std::vector<LabeledExample>& src, std::vector<std::vector<float>>& emb,
                  std::vector<std::size_t>& labels) {
    std::vector<const LogMelFrames*> items;
    for (const auto& e : src) {
      items.push_back(&e.features);
      labels.push_back(e.label);
    }
    emb = embed_all(embedder, items);
  };
  fill(train, task.train_embeddings, task.train_labels);
  fill(dev, task.dev_embeddings, task.dev_labels);
  fill(test, task.test_embeddings, task.test_labels);
  return task;
}

}  // namespace kwsem
