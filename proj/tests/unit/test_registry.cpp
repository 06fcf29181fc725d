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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "kwsem/error.hpp"
#include "kwsem/registry.hpp"
#include "oracles.hpp"

namespace kwsem {
namespace {

constexpr std::size_t kDim = 12;

// Cluster c is centred on 3 * e_c; cluster `negative` sits at the origin.
std::vector<std::vector<float>> cluster(std::size_t c, std::size_t n, Rng& rng, bool negative = false,
                                        double spread = 0.4) {
  std::vector<std::vector<float>> out(n, std::vector<float>(kDim));
  for (auto& v : out) {
    for (std::size_t d = 0; d < kDim; ++d) {
      const double centre = (!negative && d == c) ? 3.0 : 0.0;
      v[d] = static_cast<float>(centre + rng.uniform(-spread, spread));
    }
  }
  return out;
}

double mean_bce(const SigmoidClassifier& c, const std::vector<std::vector<float>>& pos,
                const std::vector<std::vector<float>>& neg) {
  double acc = 0.0;
  for (const auto& e : pos) acc -= std::log(c.confidence(e));
  for (const auto& e : neg) acc -= std::log(1.0 - c.confidence(e));
  return acc / static_cast<double>(pos.size() + neg.size());
}

TEST(Decide, ThresholdRule) {
  const std::vector<std::string> kw = {"first", "second"};
  std::vector<double> conf = {0.3, 0.4};
  auto d = decide(conf, kw);
  EXPECT_EQ(d.label, kNegativeLabel);
  EXPECT_FALSE(d.index.has_value());
  conf = {0.3, 0.7};
  EXPECT_EQ(decide(conf, kw).label, "second");
  conf = {0.7, 0.7};
  d = decide(conf, kw);
  EXPECT_EQ(d.label, "first");
  EXPECT_EQ(*d.index, 0u);
  conf = {0.5, 0.2};
  EXPECT_EQ(decide(conf, kw).label, "first");
  conf = {0.49999999, 0.2};
  EXPECT_EQ(decide(conf, kw).label, kNegativeLabel);
}

TEST(Registry, SeparableKeywordTrainsToLowLoss) {
  Rng rng(1);
  KeywordRegistry reg;
  const auto neg = cluster(0, 50, rng, true);
  const auto pos = cluster(0, 5, rng);
  reg.set_negative_embeddings(neg);
  const double loss = reg.register_embeddings("alpha", pos);
  EXPECT_LT(loss, 0.1);
  EXPECT_NEAR(mean_bce(reg.classifiers()[0], pos, neg), loss, 1e-4);
  EXPECT_EQ(reg.infer_embedding(pos[0]).label, "alpha");
  EXPECT_EQ(reg.infer_embedding(neg[0]).label, kNegativeLabel);
}

TEST(Registry, EarlierClassifiersUnchangedAndParameterCount) {
  Rng rng(2);
  KeywordRegistry reg;
  reg.set_negative_embeddings(cluster(0, 50, rng, true));
  std::vector<std::uint64_t> prints;
  for (std::size_t k = 0; k < 10; ++k) {
    std::vector<std::uint64_t> before;
    for (const auto& c : reg.classifiers()) before.push_back(c.fingerprint());
    reg.register_embeddings("kw" + std::to_string(k), cluster(k, 5, rng));
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(reg.classifiers()[i].fingerprint(), before[i]);
    EXPECT_EQ(reg.classifiers().back().order, k);
  }
  EXPECT_EQ(reg.size(), 10u);
  EXPECT_EQ(reg.parameter_count(), 10u * (kDim + 1));

  KeywordRegistry full;
  full.set_negative_embeddings({std::vector<float>(96, 0.0f)});
  for (int k = 0; k < 10; ++k) full.register_embeddings("w" + std::to_string(k), {std::vector<float>(96, 1.0f)}, {1e-2, 5});
  EXPECT_EQ(full.parameter_count(), 970u);
}

TEST(Registry, Errors) {
  KeywordRegistry reg;
  EXPECT_THROW(reg.infer_embedding(std::vector<float>(kDim, 0.0f)), StateError);
  reg.set_negative_embeddings({std::vector<float>(kDim, 0.0f)});
  reg.register_embeddings("a", {std::vector<float>(kDim, 1.0f)});
  EXPECT_THROW(reg.register_embeddings("a", {std::vector<float>(kDim, 1.0f)}), ConfigError);
  EXPECT_THROW(reg.register_embeddings("b", {}), DataError);
  const auto emb = Embedder<float>::build(testing::tiny_arch(), 1);
  const auto ex = testing::toy_examples(1, 1, 1);
  std::vector<const LogMelFrames*> clips = {&ex[0].features};
  EXPECT_THROW(reg.register_keyword(emb, "c", clips), StateError);
}

TEST(Registry, DeterministicAndEncodeRoundTrip) {
  auto build = [] {
    Rng rng(3);
    KeywordRegistry reg(0.6);
    reg.set_negative_embeddings(cluster(0, 20, rng, true));
    for (std::size_t k = 0; k < 3; ++k) reg.register_embeddings("k" + std::to_string(k), cluster(k, 5, rng));
    return reg;
  };
  const auto a = build();
  const auto b = build();
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.classifiers()[i].fingerprint(), b.classifiers()[i].fingerprint());
  const auto c = KeywordRegistry::decode(a.encode());
  EXPECT_EQ(c.threshold(), 0.6);
  EXPECT_EQ(c.keywords(), a.keywords());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(c.classifiers()[i].fingerprint(), a.classifiers()[i].fingerprint());
  EXPECT_TRUE(c.negative_embeddings().empty());
  EXPECT_EQ(a.prefix(2).keywords(), (std::vector<std::string>{"k0", "k1"}));
  EXPECT_EQ(a.snapshots().size(), 3u);
  auto bytes = a.encode();
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(KeywordRegistry::decode(bytes), FormatError);
}

TEST(Registry, RegisterKeywordUsesFrozenEmbedder) {
  auto emb = Embedder<float>::build(testing::tiny_arch(), 4);
  emb.set_frozen(true);
  const auto before = emb.export_buffers();
  const auto pos = testing::toy_examples(2, 5, 5);
  std::vector<const LogMelFrames*> neg_clips, pos_clips;
  for (const auto& e : pos) (e.label == 0 ? neg_clips : pos_clips).push_back(&e.features);
  KeywordRegistry reg;
  reg.cache_negatives(emb, neg_clips);
  EXPECT_EQ(reg.negative_embeddings().size(), 5u);
  reg.register_keyword(emb, "target", pos_clips);
  EXPECT_EQ(emb.export_buffers(), before);
  const auto d = reg.infer(emb, *pos_clips[0]);
  EXPECT_EQ(d.confidences.size(), 1u);
}

TEST(ScoreClass, ZeroOverZeroIsZero) {
  const std::vector<std::string> pred = {"a", "a", "b"};
  const std::vector<std::string> truth = {"a", "b", "b"};
  const auto a = score_class(pred, truth, "a");
  EXPECT_DOUBLE_EQ(a.precision, 0.5);
  EXPECT_DOUBLE_EQ(a.recall, 1.0);
  EXPECT_NEAR(a.f1, 2.0 / 3.0, 1e-12);
  const auto c = score_class(pred, truth, "c");
  EXPECT_EQ(c.precision, 0.0);
  EXPECT_EQ(c.recall, 0.0);
  EXPECT_EQ(c.f1, 0.0);
  const std::vector<std::string> never = {"a", "a", "a"};
  EXPECT_EQ(score_class(never, truth, "b").f1, 0.0);
}

TEST(Timeline, PerfectClassifierScoresOne) {
  Rng rng(6);
  KeywordRegistry reg;
  reg.set_negative_embeddings(cluster(0, 30, rng, true, 0.2));
  std::vector<std::vector<float>> test;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < 3; ++k) {
    reg.register_embeddings("k" + std::to_string(k), cluster(k, 5, rng, false, 0.2));
    for (auto& e : cluster(k, 6, rng, false, 0.2)) {
      test.push_back(e);
      labels.push_back("k" + std::to_string(k));
    }
  }
  for (auto& e : cluster(0, 6, rng, true, 0.2)) {
    test.push_back(e);
    labels.push_back(kNegativeLabel);
  }
  const auto snaps = reg.snapshots();
  const auto report = evaluate_timeline(snaps, test, labels);
  EXPECT_EQ(report.entries.size(), 1u + 2u + 3u);
  for (const auto& e : report.entries) EXPECT_EQ(e.score.f1, 1.0) << e.snapshot << " " << e.keyword;
  EXPECT_EQ(report.final_accuracy, 1.0);
}

TEST(Timeline, MatchesConfusionMatrixOracle) {
  Rng rng(7);
  KeywordRegistry reg;
  reg.set_negative_embeddings(cluster(0, 50, rng, true, 1.2));
  std::vector<std::vector<float>> test;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < 5; ++k) {
    reg.register_embeddings("k" + std::to_string(k), cluster(k, 5, rng, false, 1.2), {1e-2, 100});
    for (auto& e : cluster(k, 20, rng, false, 1.8)) {
      test.push_back(e);
      labels.push_back("k" + std::to_string(k));
    }
  }
  for (auto& e : cluster(0, 20, rng, true, 1.8)) {
    test.push_back(e);
    labels.push_back(kNegativeLabel);
  }
  const auto snaps = reg.snapshots();
  const auto report = evaluate_timeline(snaps, test, labels);
  std::size_t entry = 0;
  bool imperfect = false;
  for (std::size_t s = 0; s < snaps.size(); ++s) {
    std::vector<std::string> pred, truth;
    const auto names = snaps[s].keywords();
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (labels[i] != kNegativeLabel && std::find(names.begin(), names.end(), labels[i]) == names.end()) continue;
      const auto conf = snaps[s].confidences(test[i]);
      std::size_t best = 0;
      for (std::size_t j = 1; j < conf.size(); ++j) if (conf[j] > conf[best]) best = j;
      pred.push_back(conf[best] < 0.5 ? kNegativeLabel : names[best]);
      truth.push_back(labels[i]);
    }
    const auto oracle_scores = oracle::confusion_scores(pred, truth);
    for (const auto& k : names) {
      ASSERT_LT(entry, report.entries.size());
      const auto& e = report.entries[entry++];
      EXPECT_EQ(e.snapshot, s + 1);
      EXPECT_EQ(e.keyword, k);
      const auto it = oracle_scores.find(k);
      const oracle::PRF want = it == oracle_scores.end() ? oracle::PRF{} : it->second;
      EXPECT_NEAR(e.score.precision, want.precision, 1e-12);
      EXPECT_NEAR(e.score.recall, want.recall, 1e-12);
      EXPECT_NEAR(e.score.f1, want.f1, 1e-12);
      imperfect = imperfect || e.score.f1 < 1.0;
    }
  }
  EXPECT_EQ(entry, report.entries.size());
  EXPECT_TRUE(imperfect) << "toy data should produce some confusions";
  EXPECT_EQ(evaluate_timeline(snaps, test, labels).entries.size(), report.entries.size());
}

TEST(Timeline, CsvFormat) {
  testing::TempDir dir;
  TimelineReport r;
  r.entries = {{1, "alpha", {1.0, 0.5, 2.0 / 3.0}}, {2, "a,b", {0.0, 0.0, 0.0}}};
  write_timeline_csv(dir.file("t.csv"), r);
  const auto bytes = testing::read_bytes(dir.file("t.csv"));
  const std::string text(bytes.begin(), bytes.end());
  EXPECT_EQ(text.substr(0, text.find('\n')), "snapshot,class,precision,recall,f1");
  EXPECT_NE(text.find("1,alpha,1,0.5,0.6666666666666666"), std::string::npos);
  EXPECT_NE(text.find("2,\"a,b\",0,0,0"), std::string::npos);
}

IncrementalTask toy_incremental(std::uint64_t seed) {
  Rng rng(seed);
  IncrementalTask t;
  for (std::size_t k = 0; k < 8; ++k) t.keywords.push_back("kw" + std::to_string(k));
  auto add = [&](std::vector<std::vector<float>>& e, std::vector<std::size_t>& l, std::size_t label,
                 const std::vector<std::vector<float>>& xs) {
    for (const auto& x : xs) {
      e.push_back(x);
      l.push_back(label);
    }
  };
  for (std::size_t k = 0; k < 8; ++k) {
    add(t.train_embeddings, t.train_labels, k, cluster(k, 5, rng, false, 0.8));
    add(t.dev_embeddings, t.dev_labels, k, cluster(k, 5, rng, false, 0.8));
    add(t.test_embeddings, t.test_labels, k, cluster(k, 20, rng, false, 0.8));
  }
  add(t.train_embeddings, t.train_labels, 8, cluster(0, 50, rng, true, 0.8));
  add(t.dev_embeddings, t.dev_labels, 8, cluster(0, 20, rng, true, 0.8));
  add(t.test_embeddings, t.test_labels, 8, cluster(0, 40, rng, true, 0.8));
  return t;
}

TEST(Comparison, ToyGapWithinTwoPoints) {
  const auto task = toy_incremental(8);
  const auto a = compare_sequential_vs_joint(task, 3);
  EXPECT_LE(std::abs(a.gap), 0.02);
  EXPECT_EQ(a.registry.size(), 8u);
  EXPECT_EQ(a.timeline.snapshot_accuracy.size(), 8u);
  const auto b = compare_sequential_vs_joint(task, 3);
  EXPECT_EQ(a.gap, b.gap);

  // The joint head is exactly the few-shot module's fix-mode head on the same data.
  const HeadTrainConfig cfg;
  const auto head = train_linear_head(task.train_embeddings, task.train_labels, task.dev_embeddings,
                                      task.dev_labels, 9, cfg.lr_fix, cfg, 3);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < task.test_embeddings.size(); ++i) {
    correct += predict_embedding(head.head, task.test_embeddings[i]).label == task.test_labels[i];
  }
  EXPECT_NEAR(a.joint_accuracy, static_cast<double>(correct) / static_cast<double>(task.test_embeddings.size()), 1e-6);
}

}  // namespace
}  // namespace kwsem
