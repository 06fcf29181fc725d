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

#ifndef KWSEM_CLASSIFIER_HPP_
#define KWSEM_CLASSIFIER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kwsem/embedder.hpp"
#include "kwsem/layers.hpp"

namespace kwsem {

// Linear classification head on top of the embedding: logits = W e + b.
struct HeadParams {
  std::size_t num_classes = 0;
  std::size_t dim = 0;
  std::vector<float> weights;  // num_classes x dim
  std::vector<float> bias;     // num_classes
  std::vector<std::string> labels;

  static HeadParams zeros(std::size_t num_classes, std::size_t dim);
  static HeadParams random_uniform(std::size_t num_classes, std::size_t dim, std::uint64_t seed);

  // dim weights + 1 bias per class.
  std::size_t parameter_count() const { return weights.size() + bias.size(); }
  std::vector<float> logits(std::span<const float> embedding) const;
};

template <typename T>
Linear<T> head_to_linear(const HeadParams& head);
template <typename T>
HeadParams linear_to_head(const Linear<T>& layer, std::vector<std::string> labels = {});

// Index of the largest value; ties resolve to the lowest index.
template <typename T>
std::size_t argmax(std::span<const T> values);

// Embedder followed by a linear head, trained with mean cross-entropy.
template <typename T>
class ClassifierModel {
 public:
  ClassifierModel(Embedder<T> embedder, Linear<T> head)
      : embedder_(std::move(embedder)), head_(std::move(head)) {}

  Embedder<T>& embedder() { return embedder_; }
  const Embedder<T>& embedder() const { return embedder_; }
  Linear<T>& head() { return head_; }
  const Linear<T>& head() const { return head_; }

  // Embedder parameters (declaration order) followed by head weight, bias.
  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  LayerGrads<T> make_grads() const;

  Tensor4<T> logits(const Tensor4<T>& features) const;

  // Forward and backward over one batch. Gradients of the mean loss are
  // accumulated into `grads`; frozen embedder parameters get none and the
  // backward pass stops at the head.
  T loss_and_grad(const Tensor4<T>& features, std::span<const std::size_t> targets,
                  LayerGrads<T>& grads) const;

  // Mean loss only.
  T loss(const Tensor4<T>& features, std::span<const std::size_t> targets) const;

 private:
  Embedder<T> embedder_;
  Linear<T> head_;
};

// Embeds every item (batched, parallel over batches).
std::vector<std::vector<float>> embed_all(const Embedder<float>& embedder,
                                          std::span<const LogMelFrames* const> items,
                                          std::size_t batch_size = 16);

extern template class ClassifierModel<float>;
extern template class ClassifierModel<double>;

}  // namespace kwsem

#endif  // KWSEM_CLASSIFIER_HPP_
