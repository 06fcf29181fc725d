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

// Independent reference implementations used by the unit and acceptance
// tests. They deliberately avoid the library's own kernels.
#ifndef KWSEM_TESTS_ORACLES_HPP_
#define KWSEM_TESTS_ORACLES_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kwsem/miner.hpp"

namespace kwsem::oracle {

struct Dims {
  std::size_t b = 1, c = 1, t = 1, f = 1;
  std::size_t count() const { return b * c * t * f; }
  std::size_t at(std::size_t ib, std::size_t ic, std::size_t it, std::size_t jf) const {
    return ((ib * c + ic) * t + it) * f + jf;
  }
};

// Direct nested-loop convolution, zero padding, stride 1.
// w is (out, in, kt, kf).
std::vector<double> conv2d(const std::vector<double>& x, const Dims& xd, const std::vector<double>& w,
                           std::size_t out_channels, std::size_t kt, std::size_t kf,
                           const std::vector<double>& bias, std::size_t pad_t, std::size_t pad_f,
                           Dims* yd);

std::vector<double> maxpool2d(const std::vector<double>& x, const Dims& xd, std::size_t wt,
                              std::size_t wf, Dims* yd);
std::vector<double> avgpool_time(const std::vector<double>& x, const Dims& xd, std::size_t w, Dims* yd);
std::vector<double> global_avg_time(const std::vector<double>& x, const Dims& xd);

// W (rows x cols) times x plus b.
std::vector<double> matvec(const std::vector<double>& w, std::size_t rows, std::size_t cols,
                           const std::vector<double>& x, const std::vector<double>& b);

// exp(z_i) / sum exp(z_j) in extended precision.
std::vector<double> softmax(std::span<const double> z);
double cross_entropy(std::span<const double> z, std::size_t target);

// Textbook Adam on one scalar.
struct ScalarAdam {
  double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double param, double grad);
};

std::size_t utf8_length(const std::string& s);

// Collects every candidate n-gram first, then counts each candidate by an
// exhaustive token-by-token scan of every utterance.
KeywordMap brute_force_mine(const std::vector<AlignmentRecord>& records, std::size_t n_max,
                            std::size_t min_chars, std::size_t min_count);

// HTK mel scale from its textbook formula.
double htk_mel(double hz);
// Centre frequencies of n_mels triangles spaced uniformly in mel.
std::vector<double> mel_centres_hz(std::size_t n_mels, double lo_hz, double hi_hz);

struct PRF {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};
// From the full confusion matrix.
std::map<std::string, PRF> confusion_scores(const std::vector<std::string>& predicted,
                                            const std::vector<std::string>& truth);

// Top-`dims` principal axes (rows) from Eigen's dense symmetric solver.
std::vector<std::vector<double>> pca_basis(const std::vector<std::vector<double>>& rows, std::size_t dims);
// Largest principal angle between two row-basis subspaces, radians.
double max_principal_angle(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

// Mean silhouette from the textbook definition.
double silhouette(const std::vector<std::vector<double>>& points, const std::vector<std::string>& groups);

}  // namespace kwsem::oracle

#endif  // KWSEM_TESTS_ORACLES_HPP_
