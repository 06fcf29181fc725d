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

#include "kwsem/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kwsem/error.hpp"

namespace kwsem {

template <typename T>
std::vector<T> softmax(std::span<const T> logits) {
  std::vector<T> p(logits.size());
  if (logits.empty()) return p;
  const T m = *std::max_element(logits.begin(), logits.end());
  T sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (T& v : p) v /= sum;
  return p;
}

template <typename T>
LossAndGrad<T> softmax_cross_entropy(std::span<const T> logits, std::size_t target) {
  if (target >= logits.size()) {
    throw IndexError("target class " + std::to_string(target) + " out of range for " +
                     std::to_string(logits.size()) + " logits");
  }
  const T m = *std::max_element(logits.begin(), logits.end());
  T sum = 0;
  for (const T z : logits) sum += std::exp(z - m);
  const T log_sum = std::log(sum);
  LossAndGrad<T> out;
  out.loss = -(logits[target] - m - log_sum);
  out.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.grad[i] = std::exp(logits[i] - m - log_sum);
  }
  out.grad[target] -= T(1);
  return out;
}

template <typename T>
T sigmoid(T z) {
  if (z >= 0) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

template <typename T>
BinaryLoss sigmoid_bce(T logit, int label) {
  const double z = static_cast<double>(logit);
  const double y = label != 0 ? 1.0 : 0.0;
  BinaryLoss out;
  out.loss = std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
  out.grad = sigmoid(z) - y;
  return out;
}

template <typename T>
T batch_cross_entropy(const Tensor4<T>& logits, std::span<const std::size_t> targets,
                      Tensor4<T>* grad) {
  const Shape4& s = logits.shape();
  const std::size_t classes = s.channels * s.time * s.freq;
  if (targets.size() != s.batch) {
    throw ShapeError("batch of " + std::to_string(s.batch) + " logits but " +
                     std::to_string(targets.size()) + " targets");
  }
  if (grad != nullptr) *grad = Tensor4<T>(s);
  double total = 0.0;
  const T inv_b = T(1) / static_cast<T>(s.batch);
  for (std::size_t b = 0; b < s.batch; ++b) {
    std::span<const T> row(logits.data() + b * classes, classes);
    LossAndGrad<T> lg = softmax_cross_entropy(row, targets[b]);
    total += static_cast<double>(lg.loss);
    if (grad != nullptr) {
      T* g = grad->data() + b * classes;
      for (std::size_t i = 0; i < classes; ++i) g[i] = lg.grad[i] * inv_b;
    }
  }
  return static_cast<T>(total / static_cast<double>(s.batch));
}

template std::vector<float> softmax<float>(std::span<const float>);
template std::vector<double> softmax<double>(std::span<const double>);
template LossAndGrad<float> softmax_cross_entropy<float>(std::span<const float>, std::size_t);
template LossAndGrad<double> softmax_cross_entropy<double>(std::span<const double>, std::size_t);
template float sigmoid<float>(float);
template double sigmoid<double>(double);
template BinaryLoss sigmoid_bce<float>(float, int);
template BinaryLoss sigmoid_bce<double>(double, int);
template float batch_cross_entropy<float>(const Tensor4<float>&, std::span<const std::size_t>,
                                          Tensor4<float>*);
template double batch_cross_entropy<double>(const Tensor4<double>&,
                                            std::span<const std::size_t>, Tensor4<double>*);

}  // namespace kwsem
