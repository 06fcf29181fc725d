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

#ifndef KWSEM_EVALKIT_HPP_
#define KWSEM_EVALKIT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kwsem/embedder.hpp"
#include "kwsem/features.hpp"
#include "kwsem/fewshot.hpp"
#include "kwsem/manifest.hpp"

namespace kwsem {

// Loads each referenced audio file once, centres every row's span in a 2 s
// window and computes log-mel features (parallel over rows).
std::vector<LogMelFrames> load_row_features(const std::vector<ManifestRow>& rows);

// Rows of `manifest` as labelled examples, features looked up by row index.
std::vector<LabeledExample> to_examples(const std::vector<ManifestRow>& rows,
                                        const std::vector<LogMelFrames>& features);

struct SweepConfig {
  std::vector<HeadMode> modes = {HeadMode::fix};
  std::vector<std::size_t> ks = {1, 5, 10};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::size_t negatives_per_k = 3;  // k_neg = negatives_per_k * K
  HeadTrainConfig head;

  void validate() const;  // ConfigError on empty lists or K = 0
};

struct SweepRow {
  HeadMode mode = HeadMode::fix;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};

struct SweepAggregate {
  HeadMode mode = HeadMode::fix;
  std::size_t k = 0;
  double mean_accuracy = 0.0;
  std::size_t runs = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;
};

// One few-shot run per (mode, K, seed): K-shot sampling from the "train"
// split, early stopping on "dev", accuracy on every "test" row.
// `features` is indexed like manifest.rows.
SweepResult run_sweep(const Embedder<float>& embedder, const ClassedManifest& manifest,
                      const std::vector<LogMelFrames>& features, const SweepConfig& config);

// results.csv: header mode,K,seed,accuracy; per-run rows, then one row per
// (mode, K) with seed "mean".
void write_sweep_csv(const std::string& path, const SweepResult& result);

struct ExperimentSpec {
  std::string manifest_path;
  std::string checkpoint_path;
  std::vector<std::string> classes;         // empty: every non-negative keyword
  std::vector<std::string> negative_words;  // grouped into the negative class
  SweepConfig sweep;
  std::string output_dir;

  void validate() const;
};

// File-level sweep; writes <output_dir>/results.csv. A missing checkpoint is
// a ConfigError.
SweepResult run_sweep(const ExperimentSpec& spec);

struct SymmetricEigen {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

// Cyclic Jacobi rotations on a dense symmetric matrix (row-major n x n).
SymmetricEigen jacobi_eigen(std::vector<double> matrix, std::size_t n, double tolerance = 1e-14,
                            std::size_t max_sweeps = 100);

struct PcaResult {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // unit vectors, largest-magnitude loading positive
  std::vector<double> variances;                // eigenvalues of the covariance
  std::vector<std::vector<double>> coordinates;  // N x dims
};

// Mean-centred PCA via the covariance eigendecomposition. Throws DataError
// for fewer than 2 rows.
PcaResult pca_project(const std::vector<std::vector<float>>& embeddings, std::size_t dims = 2);

struct ProjectionRow {
  std::string keyword;
  std::string utterance_id;
  double pc1 = 0.0;
  double pc2 = 0.0;
};

std::vector<ProjectionRow> projection_table(const std::vector<std::string>& keywords,
                                            const std::vector<std::string>& utterance_ids,
                                            const PcaResult& pca);
void write_projections_tsv(const std::string& path, const std::vector<ProjectionRow>& rows);

// Mean silhouette coefficient (euclidean) over all points. Throws DataError
// with fewer than 2 groups or any group smaller than 2 points.
double cluster_separation(const std::vector<std::vector<double>>& points,
                          const std::vector<std::string>& groups);

}  // namespace kwsem

#endif  // KWSEM_EVALKIT_HPP_
