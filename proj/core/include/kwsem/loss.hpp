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

#ifndef KWSEM_LOSS_HPP_
#define KWSEM_LOSS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "kwsem/tensor.hpp"

namespace kwsem {

template <typename T>
struct LossAndGrad {
  T loss;
  std::vector<T> grad;
};

// Max-subtracted softmax.
template <typename T>
std::vector<T> softmax(std::span<const T> logits);

// -log softmax(logits)[target]; grad = softmax - one_hot(target).
template <typename T>
LossAndGrad<T> softmax_cross_entropy(std::span<const T> logits, std::size_t target);

template <typename T>
T sigmoid(T z);

struct BinaryLoss {
  double loss;
  double grad;
};

// Stable binary cross-entropy on a logit: max(z,0) - z*y + log1p(exp(-|z|)).
template <typename T>
BinaryLoss sigmoid_bce(T logit, int label);

// Mean cross-entropy over a (B, V, 1, 1) logit batch. When `grad` is given it
// receives dL/dlogits for the mean loss.
template <typename T>
T batch_cross_entropy(const Tensor4<T>& logits, std::span<const std::size_t> targets,
                      Tensor4<T>* grad);

}  // namespace kwsem

#endif  // KWSEM_LOSS_HPP_
