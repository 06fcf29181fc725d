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

#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kwsem/checkpoint.hpp"
#include "kwsem/error.hpp"
#include "kwsem/evalkit.hpp"
#include "kwsem/fewshot.hpp"
#include "kwsem/manifest.hpp"
#include "kwsem/miner.hpp"
#include "kwsem/pretrainer.hpp"
#include "kwsem/registry.hpp"
#include "kwsem/synth.hpp"

namespace kwsem::cli {

namespace fs = std::filesystem;

namespace {

std::string out_file(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void resolve_audio_paths(std::vector<AlignmentRecord>& records, const std::string& alignments_path) {
  const fs::path base = fs::absolute(fs::path(alignments_path)).parent_path();
  for (auto& r : records) {
    const fs::path p(r.audio_path);
    if (p.is_relative()) r.audio_path = (base / p).lexically_normal().string();
  }
}

std::map<std::string, std::string> read_pools(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::map<std::string, std::string> pools;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path + ":" + std::to_string(lineno) + ": expected utterance<TAB>pool");
    const std::string pool = line.substr(tab + 1);
    if (pool != "clean" && pool != "other") {
      throw ParseError(path + ":" + std::to_string(lineno) + ": pool must be clean or other, got '" + pool + "'");
    }
    pools[line.substr(0, tab)] = pool;
  }
  return pools;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<ManifestRow> filter_split(const std::vector<ManifestRow>& rows, const std::string& split) {
  std::vector<ManifestRow> out;
  for (const auto& r : rows) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

std::vector<LabeledExample> load_examples(const std::vector<ManifestRow>& rows) {
  return to_examples(rows, load_row_features(rows));
}

double head_accuracy(const Embedder<float>& embedder, const HeadParams& head,
                     const std::vector<LabeledExample>& examples) {
  return examples.empty() ? 0.0 : evaluate_classifier(embedder, head, examples);
}

}  // namespace

nlohmann::json cmd_synth(const SynthArgs& args, std::ostream& log) {
  CorpusConfig config;
  config.utterances = args.utterances;
  config.vocabulary_size = args.vocabulary;
  config.phrases = args.phrases;
  config.min_words = args.min_words;
  config.max_words = args.max_words;
  config.phrase_probability = args.phrase_probability;
  config.other_fraction = args.other_fraction;
  config.seed = args.seed;
  const Corpus corpus = make_corpus(config);
  write_corpus(args.out, corpus);
  std::size_t words = 0;
  for (const auto& r : corpus.records) words += r.words.size();
  log << "wrote " << corpus.records.size() << " utterances (" << words << " words) to " << args.out << "\n";
  return {{"utterances", corpus.records.size()}, {"words", words}};
}

nlohmann::json cmd_mine(const MineArgs& args, std::ostream& log) {
  auto records = parse_alignments(args.alignments);
  resolve_audio_paths(records, args.alignments);
  const MiningConfig mining{args.n_max, args.min_chars, args.min_count};
  const KeywordMap mined = mine_keywords(records, mining);
  if (mined.empty()) {
    throw DataError("no n-gram with >= " + std::to_string(args.min_chars) + " characters occurs >= " +
                    std::to_string(args.min_count) + " times; vocabulary is empty");
  }
  const MinedDataset ds = split_holdout(mined, mining, HoldoutConfig{args.holdout, args.holdout_min, args.seed});
  for (const auto& w : ds.warnings) log << "warning: " << w << "\n";

  std::optional<KeywordMap> dev;
  if (!args.dev_alignments.empty()) {
    auto dev_records = parse_alignments(args.dev_alignments);
    resolve_audio_paths(dev_records, args.dev_alignments);
    const auto& kws = ds.vocab.keywords();
    dev = find_occurrences(dev_records, std::set<std::string>(kws.begin(), kws.end()), args.n_max);
  }
  const auto pretrain_rows = make_pretrain_manifest(ds, dev, args.dev_fraction, args.seed);

  std::map<std::string, std::string> pools;
  if (!args.pools.empty()) pools = read_pools(args.pools);
  const PoolLookup pool_of = [&](const std::string& utt) {
    const auto it = pools.find(utt);
    return it == pools.end() ? std::string("clean") : it->second;
  };
  const auto holdout_rows = make_librikws_splits(ds.holdout_vocab, ds.holdout, pool_of,
                                                 SplitConfig{args.train_per_keyword, args.dev_per_keyword, args.seed});

  write_manifest(out_file(args.out, "pretrain_manifest.csv"), pretrain_rows);
  write_manifest(out_file(args.out, "holdout_manifest.csv"), holdout_rows);
  write_lines(out_file(args.out, "vocab.txt"), ds.vocab.keywords());
  write_lines(out_file(args.out, "holdout_vocab.txt"), ds.holdout_vocab);
  log << "mined " << mined.size() << " keywords: " << ds.vocab.size() << " pre-training, "
      << ds.holdout_vocab.size() << " held out\n";
  return {{"mined_keywords", mined.size()},
          {"pretrain_keywords", ds.vocab.size()},
          {"holdout_keywords", ds.holdout_vocab.size()},
          {"pretrain_rows", pretrain_rows.size()},
          {"holdout_rows", holdout_rows.size()},
          {"excluded_utterances", ds.excluded_utterances.size()},
          {"warnings", ds.warnings}};
}

nlohmann::json cmd_pretrain(const PretrainArgs& args, std::ostream& log) {
  const auto rows = read_manifest(args.manifest);
  std::map<std::size_t, std::string> names;
  for (const auto& r : rows) {
    const auto [it, inserted] = names.emplace(r.class_index, r.keyword);
    if (!inserted && it->second != r.keyword) {
      throw ValidationError("class index " + std::to_string(r.class_index) + " used by '" + it->second +
                            "' and '" + r.keyword + "'");
    }
  }
  KeywordVocab vocab;
  for (const auto& [i, name] : names) {
    if (i != vocab.size()) throw ValidationError("class indices are not contiguous from 0");
    vocab.add(name);
  }
  const auto train = load_examples(filter_split(rows, "train"));
  const auto dev = load_examples(filter_split(rows, "dev"));

  PretrainConfig config;
  config.learning_rate = args.lr;
  config.batch_size = args.batch;
  config.max_steps = args.steps;
  config.eval_every = std::min(args.eval_every, args.steps);
  config.seed = args.seed;
  config.target_dev_accuracy = args.target_dev;
  config.target_train_accuracy = args.target_train;
  log << "pre-training on " << train.size() << " clips, " << vocab.size() << " keywords, " << dev.size()
      << " dev clips\n";
  const PretrainResult result = pretrain(train, dev, vocab, config, [&](const HistoryRow& row) {
    log << "step " << row.step << " loss " << row.train_loss << " dev_acc " << row.dev_accuracy << "\n";
  });
  HeadParams head = result.head;
  head.labels = vocab.keywords();
  save_checkpoint(result.embedder, out_file(args.out, "checkpoint.ksem"), {{kHeadSection, encode_head(head)}});
  write_history_csv(out_file(args.out, "history.csv"), result.history);
  return {{"best_step", result.best_step},
          {"best_dev_accuracy", result.best_dev_accuracy},
          {"steps_run", result.history.empty() ? 0 : result.history.back().step},
          {"keywords", vocab.size()}};
}

nlohmann::json cmd_train_head(const HeadArgs& args, std::ostream& log) {
  const Checkpoint ckpt = load_checkpoint(args.checkpoint);
  FewShotTask task = load_task_file(args.task);
  if (!args.mode.empty()) task.mode = parse_head_mode(args.mode);
  const ClassedManifest cm = select_task_classes(read_manifest(args.manifest), task);
  const auto train_rows = sample_kshot(cm, task, "train");
  const auto train = load_examples(train_rows);
  const auto dev = load_examples(filter_split(cm.rows, "dev"));
  const auto test = load_examples(filter_split(cm.rows, "test"));
  log << "training " << to_string(task.mode) << " head: " << cm.class_names.size() << " classes, "
      << train.size() << " train / " << dev.size() << " dev / " << test.size() << " test clips\n";

  const HeadTrainResult result = train_head(ckpt.embedder, train, dev, cm.class_names.size(), task.mode, task.seed);
  HeadParams head = result.head;
  head.labels = cm.class_names;
  const Embedder<float>& embedder = result.embedder ? *result.embedder : ckpt.embedder;
  auto sections = ckpt.sections;
  sections[kHeadSection] = encode_head(head);
  save_checkpoint(embedder, out_file(args.out, "checkpoint.ksem"), sections);

  const double dev_acc = head_accuracy(embedder, head, dev);
  const double test_acc = head_accuracy(embedder, head, test);
  {
    std::ofstream out(out_file(args.out, "metrics.csv"), std::ios::binary);
    out << "split,accuracy\n";
    out << "dev," << format_double(dev_acc) << "\n";
    out << "test," << format_double(test_acc) << "\n";
    if (!out) throw IoError("cannot write metrics.csv");
  }
  {
    std::ofstream out(out_file(args.out, "history.csv"), std::ios::binary);
    out << "epoch,train_loss,dev_accuracy,dev_loss\n";
    for (const auto& h : result.history) {
      out << h.epoch << ',' << format_double(h.train_loss) << ',' << format_double(h.dev_accuracy) << ','
          << format_double(h.dev_loss) << "\n";
    }
    if (!out) throw IoError("cannot write history.csv");
  }
  log << "test accuracy " << test_acc << "\n";
  return {{"mode", to_string(task.mode)},
          {"classes", cm.class_names},
          {"best_epoch", result.best_epoch},
          {"trainable_parameters", result.trainable_parameters},
          {"dev_accuracy", dev_acc},
          {"test_accuracy", test_acc}};
}

nlohmann::json cmd_register(const RegisterArgs& args, std::ostream& log) {
  if (args.keywords.empty()) throw ConfigError("register needs at least one --keyword");
  Checkpoint ckpt = load_checkpoint(args.checkpoint);
  ckpt.embedder.set_frozen(true);
  KeywordRegistry registry;
  if (const auto it = ckpt.sections.find(kRegistrySection); it != ckpt.sections.end()) {
    registry = KeywordRegistry::decode(it->second);
  }
  const auto train_rows = filter_split(read_manifest(args.manifest), "train");
  Rng rng(args.seed);

  const std::set<std::string> neg_words(args.negative_words.begin(), args.negative_words.end());
  std::vector<ManifestRow> neg_pool;
  for (const auto& r : train_rows) {
    if (neg_words.count(r.keyword) != 0) neg_pool.push_back(r);
  }
  if (!neg_words.empty() && neg_pool.empty()) throw DataError("no train rows for the negative words");
  std::vector<ManifestRow> negatives;
  for (const std::size_t i : rng.sample_without_replacement(neg_pool.size(), std::min(args.k_neg, neg_pool.size()))) {
    negatives.push_back(neg_pool[i]);
  }
  {
    const auto neg = load_examples(negatives);
    std::vector<const LogMelFrames*> items;
    for (const auto& e : neg) items.push_back(&e.features);
    registry.cache_negatives(ckpt.embedder, items);
  }

  const RegistrationConfig config{args.lr, args.epochs};
  nlohmann::json losses = nlohmann::json::object();
  for (const auto& kw : args.keywords) {
    if (neg_words.count(kw) != 0) throw ConfigError("keyword '" + kw + "' is also a negative word");
    std::vector<ManifestRow> pool;
    for (const auto& r : train_rows) {
      if (r.keyword == kw) pool.push_back(r);
    }
    if (pool.size() < args.k) {
      throw DataError("keyword '" + kw + "' has " + std::to_string(pool.size()) + " train rows; need " +
                      std::to_string(args.k));
    }
    std::vector<ManifestRow> chosen;
    for (const std::size_t i : rng.sample_without_replacement(pool.size(), args.k)) chosen.push_back(pool[i]);
    const auto pos = load_examples(chosen);
    std::vector<const LogMelFrames*> items;
    for (const auto& e : pos) items.push_back(&e.features);
    const double loss = registry.register_keyword(ckpt.embedder, kw, items, config);
    losses[kw] = loss;
    log << "registered '" << kw << "' (" << registry.size() << " total), training BCE " << loss << "\n";
  }
  auto sections = ckpt.sections;
  sections[kRegistrySection] = registry.encode();
  save_checkpoint(ckpt.embedder, out_file(args.out, "checkpoint.ksem"), sections);
  return {{"registered", registry.keywords()},
          {"trainable_parameters", registry.parameter_count()},
          {"negatives", negatives.size()},
          {"final_bce", losses}};
}

nlohmann::json cmd_eval(const EvalArgs& args, std::ostream& log) {
  const Checkpoint ckpt = load_checkpoint(args.checkpoint);
  const auto rows = filter_split(read_manifest(args.manifest), args.split);
  const std::set<std::string> neg_words(args.negative_words.begin(), args.negative_words.end());
  nlohmann::json summary = nlohmann::json::object();
  bool evaluated = false;

  if (const auto it = ckpt.sections.find(kRegistrySection); it != ckpt.sections.end()) {
    const KeywordRegistry registry = KeywordRegistry::decode(it->second);
    const auto names = registry.keywords();
    std::vector<ManifestRow> used;
    std::vector<std::string> labels;
    for (const auto& r : rows) {
      if (std::find(names.begin(), names.end(), r.keyword) != names.end()) {
        used.push_back(r);
        labels.push_back(r.keyword);
      } else if (neg_words.empty() || neg_words.count(r.keyword) != 0) {
        used.push_back(r);
        labels.push_back(kNegativeLabel);
      }
    }
    if (used.empty()) throw DataError("no " + args.split + " rows to evaluate the registry on");
    const auto examples = load_examples(used);
    std::vector<const LogMelFrames*> items;
    for (const auto& e : examples) items.push_back(&e.features);
    const auto emb = embed_all(ckpt.embedder, items);
    const auto snaps = registry.snapshots();
    const TimelineReport report = evaluate_timeline(snaps, emb, labels);
    write_timeline_csv(out_file(args.out, "timeline.csv"), report);
    summary["snapshots"] = snaps.size();
    summary["snapshot_accuracy"] = report.snapshot_accuracy;
    summary["registry_accuracy"] = report.final_accuracy;
    log << "registry: " << snaps.size() << " snapshots, final accuracy " << report.final_accuracy << "\n";
    evaluated = true;
  }

  if (const auto it = ckpt.sections.find(kHeadSection); it != ckpt.sections.end()) {
    const HeadParams head = decode_head(it->second);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < head.labels.size(); ++i) index[head.labels[i]] = i;
    const auto neg_it = index.find(kNegativeClass);
    std::vector<ManifestRow> used;
    for (const auto& r : rows) {
      if (const auto f = index.find(r.keyword); f != index.end() && r.keyword != kNegativeClass) {
        used.push_back(r);
        used.back().class_index = f->second;
      } else if (neg_it != index.end() && neg_words.count(r.keyword) != 0) {
        used.push_back(r);
        used.back().class_index = neg_it->second;
      }
    }
    if (!used.empty()) {
      const double acc = evaluate_classifier(ckpt.embedder, head, load_examples(used));
      std::ofstream out(out_file(args.out, "metrics.csv"), std::ios::binary);
      out << "split,accuracy\n" << args.split << ',' << format_double(acc) << "\n";
      if (!out) throw IoError("cannot write metrics.csv");
      summary["head_accuracy"] = acc;
      summary["head_examples"] = used.size();
      log << "head: accuracy " << acc << " on " << used.size() << " clips\n";
      evaluated = true;
    }
  }
  if (!evaluated) throw ConfigError("checkpoint has neither a usable HEAD nor a REGISTRY section");
  return summary;
}

nlohmann::json cmd_sweep(const SweepArgs& args, std::ostream& log) {
  ExperimentSpec spec;
  spec.manifest_path = args.manifest;
  spec.checkpoint_path = args.checkpoint;
  spec.output_dir = args.out;
  spec.classes = args.classes;
  spec.negative_words = args.negative_words;
  spec.sweep.modes.clear();
  for (const auto& m : args.modes) spec.sweep.modes.push_back(parse_head_mode(m));
  spec.sweep.ks = args.ks;
  spec.sweep.seeds = args.seeds;
  spec.sweep.negatives_per_k = args.negatives_per_k;
  const SweepResult result = run_sweep(spec);
  nlohmann::json agg = nlohmann::json::array();
  for (const auto& a : result.aggregates) {
    log << to_string(a.mode) << " K=" << a.k << " mean accuracy " << a.mean_accuracy << "\n";
    agg.push_back({{"mode", to_string(a.mode)}, {"K", a.k}, {"mean_accuracy", a.mean_accuracy}});
  }
  return {{"runs", result.rows.size()}, {"aggregates", agg}};
}

nlohmann::json cmd_project(const ProjectArgs& args, std::ostream& log) {
  const Checkpoint ckpt = load_checkpoint(args.checkpoint);
  const auto all = read_manifest(args.manifest);
  const std::set<std::string> wanted(args.keywords.begin(), args.keywords.end());
  std::set<std::string> present;
  std::map<std::string, std::size_t> taken;
  std::vector<ManifestRow> rows;
  for (const auto& r : all) {
    if (args.split != "all" && r.split != args.split) continue;
    if (!wanted.empty() && wanted.count(r.keyword) == 0) continue;
    present.insert(r.keyword);
    if (args.max_per_keyword != 0 && taken[r.keyword] >= args.max_per_keyword) continue;
    ++taken[r.keyword];
    rows.push_back(r);
  }
  for (const auto& k : wanted) {
    if (present.count(k) == 0) throw DataError("keyword '" + k + "' has no " + args.split + " rows");
  }
  const auto examples = load_examples(rows);
  std::vector<const LogMelFrames*> items;
  for (const auto& e : examples) items.push_back(&e.features);
  const PcaResult pca = pca_project(embed_all(ckpt.embedder, items), 2);
  std::vector<std::string> keywords, utts;
  for (const auto& r : rows) {
    keywords.push_back(r.keyword);
    utts.push_back(r.utterance_id);
  }
  write_projections_tsv(out_file(args.out, "projections.tsv"), projection_table(keywords, utts, pca));
  nlohmann::json summary = {{"points", rows.size()}, {"groups", taken.size()}, {"variances", pca.variances}};
  bool separable = taken.size() >= 2;
  for (const auto& [k, n] : taken) separable = separable && n >= 2;
  if (separable) {
    const double s = cluster_separation(pca.coordinates, keywords);
    summary["silhouette"] = s;
    log << "silhouette " << s << "\n";
  }
  log << "projected " << rows.size() << " clips of " << taken.size() << " keywords\n";
  return summary;
}

}  // namespace kwsem::cli
