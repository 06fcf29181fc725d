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

#include "kwsem/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "kwsem/error.hpp"
#include "kwsem/loss.hpp"
#include "kwsem/parallel.hpp"
#include "kwsem/rng.hpp"

namespace kwsem {

HeadParams HeadParams::zeros(std::size_t num_classes, std::size_t dim) {
  HeadParams h;
  h.num_classes = num_classes;
  h.dim = dim;
  h.weights.assign(num_classes * dim, 0.0f);
  h.bias.assign(num_classes, 0.0f);
  return h;
}

HeadParams HeadParams::random_uniform(std::size_t num_classes, std::size_t dim,
                                      std::uint64_t seed) {
  HeadParams h = zeros(num_classes, dim);
  Rng rng(seed);
  const double limit = 1.0 / std::sqrt(static_cast<double>(dim));
  for (float& w : h.weights) w = static_cast<float>(rng.uniform(-limit, limit));
  return h;
}

std::vector<float> HeadParams::logits(std::span<const float> embedding) const {
  if (embedding.size() != dim) {
    throw ShapeError("head expects " + std::to_string(dim) + "-dim embeddings, got " +
                     std::to_string(embedding.size()));
  }
  std::vector<float> out(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    float acc = bias[c];
    const float* w = weights.data() + c * dim;
    for (std::size_t i = 0; i < dim; ++i) acc += w[i] * embedding[i];
    out[c] = acc;
  }
  return out;
}

template <typename T>
Linear<T> head_to_linear(const HeadParams& head) {
  Linear<T> layer(head.dim, head.num_classes, "head");
  if (head.weights.size() != head.num_classes * head.dim || head.bias.size() != head.num_classes) {
    throw ShapeError("head parameter buffers do not match its dimensions");
  }
  std::transform(head.weights.begin(), head.weights.end(), layer.weight().values.begin(),
                 [](float v) { return static_cast<T>(v); });
  std::transform(head.bias.begin(), head.bias.end(), layer.bias().values.begin(),
                 [](float v) { return static_cast<T>(v); });
  return layer;
}

template <typename T>
HeadParams linear_to_head(const Linear<T>& layer, std::vector<std::string> labels) {
  HeadParams h = HeadParams::zeros(layer.out_features(), layer.in_features());
  std::transform(layer.weight().values.begin(), layer.weight().values.end(), h.weights.begin(),
                 [](T v) { return static_cast<float>(v); });
  std::transform(layer.bias().values.begin(), layer.bias().values.end(), h.bias.begin(),
                 [](T v) { return static_cast<float>(v); });
  h.labels = std::move(labels);
  return h;
}

template <typename T>
std::size_t argmax(std::span<const T> values) {
  if (values.empty()) throw ShapeError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

template <typename T>
std::vector<Parameter<T>*> ClassifierModel<T>::parameters() {
  auto p = embedder_.network().parameters();
  p.push_back(&head_.weight());
  p.push_back(&head_.bias());
  return p;
}

template <typename T>
std::vector<const Parameter<T>*> ClassifierModel<T>::parameters() const {
  auto p = embedder_.network().parameters();
  p.push_back(&head_.weight());
  p.push_back(&head_.bias());
  return p;
}

template <typename T>
LayerGrads<T> ClassifierModel<T>::make_grads() const {
  const auto p = parameters();
  return LayerGrads<T>::for_parameters(p);
}

template <typename T>
Tensor4<T> ClassifierModel<T>::logits(const Tensor4<T>& features) const {
  return head_.forward(embedder_.forward(features));
}

template <typename T>
T ClassifierModel<T>::loss_and_grad(const Tensor4<T>& features,
                                    std::span<const std::size_t> targets,
                                    LayerGrads<T>& grads) const {
  const std::size_t n_embed = embedder_.network().parameters().size();
  if (grads.buffers.size() != n_embed + 2) {
    throw ShapeError("gradient buffers do not match classifier parameters");
  }
  const bool train_embedder = !embedder_.frozen();
  Tape<T> tape;
  Tensor4<T> emb = train_embedder ? embedder_.network().forward(features, tape)
                                  : embedder_.forward(features);
  const Tensor4<T> out = head_.forward(emb);
  Tensor4<T> dlogits;
  const T loss = batch_cross_entropy(out, targets, &dlogits);

  std::vector<T>* head_slots[2] = {grads.buffers[n_embed] ? &*grads.buffers[n_embed] : nullptr,
                                   grads.buffers[n_embed + 1] ? &*grads.buffers[n_embed + 1]
                                                              : nullptr};
  const Tensor4<T> demb = head_.backward(emb, out, dlogits, head_slots, train_embedder);
  if (train_embedder) {
    LayerGrads<T> embed_grads;
    embed_grads.buffers.reserve(n_embed);
    for (std::size_t i = 0; i < n_embed; ++i) embed_grads.buffers.push_back(std::move(grads.buffers[i]));
    embedder_.network().backward(tape, demb, embed_grads, false);
    for (std::size_t i = 0; i < n_embed; ++i) grads.buffers[i] = std::move(embed_grads.buffers[i]);
  }
  return loss;
}

template <typename T>
T ClassifierModel<T>::loss(const Tensor4<T>& features, std::span<const std::size_t> targets) const {
  return batch_cross_entropy(logits(features), targets, static_cast<Tensor4<T>*>(nullptr));
}

std::vector<std::vector<float>> embed_all(const Embedder<float>& embedder,
                                          std::span<const LogMelFrames* const> items,
                                          std::size_t batch_size) {
  std::vector<std::vector<float>> out(items.size());
  if (items.empty()) return out;
  batch_size = std::max<std::size_t>(batch_size, 1);
  const std::size_t batches = (items.size() + batch_size - 1) / batch_size;
  parallel_for(batches, [&](std::size_t b) {
    const std::size_t lo = b * batch_size;
    const std::size_t hi = std::min(items.size(), lo + batch_size);
    const Tensor4<float> e = embedder.forward(make_feature_batch<float>(items.subspan(lo, hi - lo)));
    const std::size_t d = e.shape().channels;
    for (std::size_t i = lo; i < hi; ++i) {
      out[i].assign(e.data() + (i - lo) * d, e.data() + (i - lo + 1) * d);
    }
  });
  return out;
}

template Linear<float> head_to_linear<float>(const HeadParams&);
template Linear<double> head_to_linear<double>(const HeadParams&);
template HeadParams linear_to_head<float>(const Linear<float>&, std::vector<std::string>);
template HeadParams linear_to_head<double>(const Linear<double>&, std::vector<std::string>);
template std::size_t argmax<float>(std::span<const float>);
template std::size_t argmax<double>(std::span<const double>);
template class ClassifierModel<float>;
template class ClassifierModel<double>;

}  // namespace kwsem
