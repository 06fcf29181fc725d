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

#include "kwsem/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

#include "kwsem/audio.hpp"
#include "kwsem/checkpoint.hpp"
#include "kwsem/error.hpp"
#include "kwsem/parallel.hpp"

namespace kwsem {

std::vector<LogMelFrames> load_row_features(const std::vector<ManifestRow>& rows) {
  std::map<std::string, std::size_t> file_index;
  std::vector<std::string> files;
  for (const auto& r : rows) {
    if (file_index.emplace(r.audio_path, files.size()).second) files.push_back(r.audio_path);
  }
  std::vector<AudioClip> audio(files.size());
  parallel_for(files.size(), [&](std::size_t i) { audio[i] = load_audio(files[i]); });
  std::vector<LogMelFrames> out(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto& r = rows[i];
    const AudioClip& clip = audio[file_index.at(r.audio_path)];
    out[i] = log_mel(fit_to_window(clip, TimeSpan{r.start_s, r.end_s}));
  });
  return out;
}

std::vector<LabeledExample> to_examples(const std::vector<ManifestRow>& rows,
                                        const std::vector<LogMelFrames>& features) {
  if (rows.size() != features.size()) throw ShapeError("row and feature counts differ");
  std::vector<LabeledExample> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back({features[i], rows[i].class_index, rows[i].utterance_id});
  }
  return out;
}

void SweepConfig::validate() const {
  if (modes.empty()) throw ConfigError("sweep needs at least one mode");
  if (ks.empty()) throw ConfigError("sweep needs at least one K");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  for (const std::size_t k : ks) {
    if (k == 0) throw ConfigError("sweep K values must be positive");
  }
  if (negatives_per_k == 0) throw ConfigError("negatives_per_k must be positive");
}

namespace {

using RowKey = std::tuple<std::string, std::string, double, double, std::string>;

RowKey key_of(const ManifestRow& r) {
  return {r.utterance_id, r.keyword, r.start_s, r.end_s, r.split};
}

double accuracy_of(const HeadParams& head, const std::vector<std::vector<float>>& emb,
                   std::span<const std::size_t> labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < emb.size(); ++i) correct += predict_embedding(head, emb[i]).label == labels[i];
  return static_cast<double>(correct) / static_cast<double>(emb.size());
}

}  // namespace

SweepResult run_sweep(const Embedder<float>& embedder, const ClassedManifest& manifest,
                      const std::vector<LogMelFrames>& features, const SweepConfig& config) {
  config.validate();
  if (features.size() != manifest.rows.size()) throw ShapeError("row and feature counts differ");

  std::map<RowKey, std::size_t> index;
  std::vector<std::size_t> dev_idx, test_idx;
  for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
    const auto& r = manifest.rows[i];
    index.emplace(key_of(r), i);
    if (r.split == "dev") dev_idx.push_back(i);
    if (r.split == "test") test_idx.push_back(i);
  }
  if (test_idx.empty()) throw DataError("manifest has no test rows");

  FewShotTask base;
  std::set<std::string> negative_words;
  for (std::size_t c = 0; c < manifest.class_names.size(); ++c) {
    if (manifest.negative_index && *manifest.negative_index == c) continue;
    base.classes.push_back(manifest.class_names[c]);
  }
  if (manifest.negative_index) {
    for (const auto& r : manifest.rows) {
      if (r.class_index == *manifest.negative_index) negative_words.insert(r.keyword);
    }
    base.negative_words.assign(negative_words.begin(), negative_words.end());
  }
  const std::size_t num_classes = manifest.class_names.size();

  auto gather = [&](const std::vector<std::size_t>& idx) {
    std::vector<LabeledExample> out;
    for (const std::size_t i : idx) out.push_back({features[i], manifest.rows[i].class_index, manifest.rows[i].utterance_id});
    return out;
  };
  auto labels_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> out;
    for (const std::size_t i : idx) out.push_back(manifest.rows[i].class_index);
    return out;
  };
  const auto dev = gather(dev_idx);
  const auto test = gather(test_idx);
  const auto dev_labels = labels_of(dev_idx);
  const auto test_labels = labels_of(test_idx);

  // Fixed-embedder runs share one embedding pass over all rows.
  std::vector<std::vector<float>> all_emb;
  if (std::find(config.modes.begin(), config.modes.end(), HeadMode::fix) != config.modes.end()) {
    std::vector<const LogMelFrames*> items;
    for (const auto& f : features) items.push_back(&f);
    all_emb = embed_all(embedder, items);
  }
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::vector<float>> out;
    for (const std::size_t i : idx) out.push_back(all_emb[i]);
    return out;
  };

  SweepResult result;
  for (const HeadMode mode : config.modes) {
    for (const std::size_t k : config.ks) {
      double sum = 0.0;
      for (const std::uint64_t seed : config.seeds) {
        FewShotTask task = base;
        task.k = k;
        task.k_neg = config.negatives_per_k * k;
        task.mode = mode;
        task.seed = seed;
        std::vector<std::size_t> train_idx;
        for (const auto& r : sample_kshot(manifest, task, "train")) train_idx.push_back(index.at(key_of(r)));
        double acc = 0.0;
        if (mode == HeadMode::fix) {
          const auto head = train_linear_head(pick(train_idx), labels_of(train_idx), pick(dev_idx), dev_labels,
                                              num_classes, config.head.lr_fix, config.head, seed);
          acc = accuracy_of(head.head, pick(test_idx), test_labels);
        } else {
          const auto trained = train_head(embedder, gather(train_idx), dev, num_classes, mode, seed, config.head);
          std::vector<const LogMelFrames*> items;
          for (const auto& e : test) items.push_back(&e.features);
          acc = accuracy_of(trained.head, embed_all(*trained.embedder, items), test_labels);
        }
        result.rows.push_back({mode, k, seed, acc});
        sum += acc;
      }
      result.aggregates.push_back({mode, k, sum / static_cast<double>(config.seeds.size()), config.seeds.size()});
    }
  }
  return result;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "mode,K,seed,accuracy\n";
  for (const auto& r : result.rows) {
    out << to_string(r.mode) << ',' << r.k << ',' << r.seed << ',' << format_double(r.accuracy) << '\n';
  }
  for (const auto& a : result.aggregates) {
    out << to_string(a.mode) << ',' << a.k << ",mean," << format_double(a.mean_accuracy) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void ExperimentSpec::validate() const {
  if (manifest_path.empty()) throw ConfigError("experiment needs a manifest path");
  if (checkpoint_path.empty()) throw ConfigError("experiment needs a checkpoint path");
  if (output_dir.empty()) throw ConfigError("experiment needs an output directory");
  sweep.validate();
}

SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  if (!std::filesystem::exists(spec.checkpoint_path)) {
    throw ConfigError("checkpoint not found: " + spec.checkpoint_path);
  }
  const Checkpoint ckpt = load_checkpoint(spec.checkpoint_path);
  const auto rows = read_manifest(spec.manifest_path);

  FewShotTask task;
  task.negative_words = spec.negative_words;
  task.classes = spec.classes;
  if (task.classes.empty()) {
    std::map<std::size_t, std::string> by_index;
    const std::set<std::string> neg(spec.negative_words.begin(), spec.negative_words.end());
    for (const auto& r : rows) {
      if (neg.count(r.keyword) == 0) by_index.emplace(r.class_index, r.keyword);
    }
    std::set<std::string> seen;
    for (const auto& [i, name] : by_index) {
      if (seen.insert(name).second) task.classes.push_back(name);
    }
  }
  const ClassedManifest manifest = select_task_classes(rows, task);
  const auto features = load_row_features(manifest.rows);
  SweepResult result = run_sweep(ckpt.embedder, manifest, features, spec.sweep);
  std::filesystem::create_directories(spec.output_dir);
  write_sweep_csv((std::filesystem::path(spec.output_dir) / "results.csv").string(), result);
  return result;
}

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n, double tolerance,
                            std::size_t max_sweeps) {
  if (a.size() != n * n) throw ShapeError("matrix is not n x n");
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto off_norm = [&]() {
    double s = 0.0, d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) (i == j ? d : s) += a[i * n + j] * a[i * n + j];
    }
    return std::pair{s, d};
  };
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    const auto [off, diag] = off_norm();
    if (off <= tolerance * tolerance * std::max(diag, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  SymmetricEigen out;
  for (const std::size_t i : order) {
    out.values.push_back(a[i * n + i]);
    std::vector<double> vec(n);
    for (std::size_t k = 0; k < n; ++k) vec[k] = v[k * n + i];
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

PcaResult pca_project(const std::vector<std::vector<float>>& embeddings, std::size_t dims) {
  const std::size_t n = embeddings.size();
  if (n < 2) throw DataError("PCA needs at least 2 embeddings");
  const std::size_t d = embeddings.front().size();
  if (dims == 0 || dims > d) throw RangeError("PCA dims must be in [1, " + std::to_string(d) + "]");
  PcaResult r;
  r.mean.assign(d, 0.0);
  for (const auto& e : embeddings) {
    if (e.size() != d) throw ShapeError("embeddings differ in size");
    for (std::size_t j = 0; j < d; ++j) r.mean[j] += e[j];
  }
  for (auto& m : r.mean) m /= static_cast<double>(n);
  std::vector<std::vector<double>> centred(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centred[i][j] = embeddings[i][j] - r.mean[j];
  }
  std::vector<double> cov(d * d, 0.0);
  for (const auto& x : centred) {
    for (std::size_t a = 0; a < d; ++a) {
      if (x[a] == 0.0) continue;
      for (std::size_t b = a; b < d; ++b) cov[a * d + b] += x[a] * x[b];
    }
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] *= scale;
      cov[b * d + a] = cov[a * d + b];
    }
  }
  const SymmetricEigen eig = jacobi_eigen(std::move(cov), d);
  for (std::size_t c = 0; c < dims; ++c) {
    std::vector<double> comp = eig.vectors[c];
    std::size_t big = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(comp[j]) > std::abs(comp[big])) big = j;
    }
    if (comp[big] < 0.0) {
      for (auto& x : comp) x = -x;
    }
    r.components.push_back(std::move(comp));
    r.variances.push_back(std::max(0.0, eig.values[c]));
  }
  r.coordinates.assign(n, std::vector<double>(dims, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < dims; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += centred[i][j] * r.components[c][j];
      r.coordinates[i][c] = s;
    }
  }
  return r;
}

std::vector<ProjectionRow> projection_table(const std::vector<std::string>& keywords,
                                            const std::vector<std::string>& utterance_ids,
                                            const PcaResult& pca) {
  if (keywords.size() != pca.coordinates.size() || utterance_ids.size() != pca.coordinates.size()) {
    throw ShapeError("projection labels and coordinates differ in count");
  }
  std::vector<ProjectionRow> rows;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    const auto& c = pca.coordinates[i];
    rows.push_back({keywords[i], utterance_ids[i], c.at(0), c.size() > 1 ? c[1] : 0.0});
  }
  return rows;
}

void write_projections_tsv(const std::string& path, const std::vector<ProjectionRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "keyword\tutt_id\tpc1\tpc2\n";
  for (const auto& r : rows) {
    out << r.keyword << '\t' << r.utterance_id << '\t' << format_double(r.pc1) << '\t' << format_double(r.pc2)
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

double cluster_separation(const std::vector<std::vector<double>>& points,
                          const std::vector<std::string>& groups) {
  if (points.size() != groups.size()) throw ShapeError("point and group counts differ");
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);
  if (members.size() < 2) throw DataError("silhouette needs at least 2 groups");
  for (const auto& [g, idx] : members) {
    if (idx.size() < 2) throw DataError("group '" + g + "' has fewer than 2 points");
  }
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < points[i].size(); ++k) {
      const double d = points[i][k] - points[j][k];
      s += d * d;
    }
    return std::sqrt(s);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [g, idx] : members) {
      double sum = 0.0;
      for (const std::size_t j : idx) sum += dist(i, j);
      if (g == groups[i]) {
        a = sum / static_cast<double>(idx.size() - 1);
      } else {
        b = std::min(b, sum / static_cast<double>(idx.size()));
      }
    }
    const double m = std::max(a, b);
    total += m == 0.0 ? 0.0 : (b - a) / m;
  }
  return total / static_cast<double>(points.size());
}

}  // namespace kwsem
