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

#include "kwsem/embedder.hpp"

#include <algorithm>
#include <cstring>

#include "kwsem/error.hpp"
#include "kwsem/rng.hpp"

namespace kwsem {

std::vector<std::size_t> channel_schedule(std::size_t first, std::size_t step, std::size_t cap,
                                          std::size_t blocks) {
  std::vector<std::size_t> out;
  std::size_t c = std::min(first, cap);
  for (std::size_t i = 0; i < blocks; ++i) {
    out.push_back(c);
    c = std::min(c + step, cap);
  }
  return out;
}

std::vector<std::size_t> ArchSpec::full_schedule() const {
  std::vector<std::size_t> s = block_channels;
  s.push_back(final_channels);
  return s;
}

void ArchSpec::validate() const {
  if (block_channels.empty() || convs_per_block == 0 || final_kernel == 0 ||
      final_channels == 0 || n_mels == 0 || input_frames == 0) {
    throw ConfigError("architecture dimensions must be positive");
  }
  if (embedding_dim != final_channels) {
    throw ConfigError("embedding_dim must equal the final block's channel count");
  }
  std::size_t freq = n_mels;
  std::size_t time = input_frames;
  for (std::size_t b = 0; b < block_channels.size(); ++b) {
    if (block_channels[b] == 0) throw ConfigError("block channel count must be positive");
    if (freq < 2 || time < 2) {
      throw ConfigError("block " + std::to_string(b + 1) + " cannot pool a " +
                        std::to_string(time) + "x" + std::to_string(freq) + " map");
    }
    freq /= 2;
    time /= 2;
  }
  if (freq != 1) {
    throw ConfigError("pooling leaves frequency dim " + std::to_string(freq) +
                      " after the last pooled block; it must be 1");
  }
  if (time < 2) {
    throw ConfigError("time axis too short (" + std::to_string(time) + ") for the final block");
  }
}

std::size_t count_parameters(const ArchSpec& spec) {
  std::size_t total = 0;
  std::size_t in = 1;
  for (const std::size_t out : spec.block_channels) {
    for (std::size_t l = 0; l < spec.convs_per_block; ++l) {
      total += in * out * 3 + out;
      in = out;
    }
  }
  for (int l = 0; l < 2; ++l) {
    total += in * spec.final_channels * spec.final_kernel + spec.final_channels;
    in = spec.final_channels;
  }
  return total;
}

template <typename T>
Embedder<T> Embedder<T>::build(const ArchSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  Sequential<T> net;
  std::vector<std::size_t> ends;
  std::size_t in = 1;
  for (std::size_t b = 0; b < spec.block_channels.size(); ++b) {
    const std::size_t out = spec.block_channels[b];
    for (std::size_t l = 0; l < spec.convs_per_block; ++l) {
      const bool freq_kernel = (l % 2) == 0;  // 1x3 first, then 3x1
      const std::string name = "block" + std::to_string(b + 1) + ".conv" + std::to_string(l + 1);
      auto conv = freq_kernel ? std::make_unique<Conv2d<T>>(in, out, 1, 3, 0, 1, name)
                              : std::make_unique<Conv2d<T>>(in, out, 3, 1, 1, 0, name);
      conv->init_he_uniform(rng);
      net.add(std::move(conv));
      net.add(std::make_unique<ReLU<T>>());
      in = out;
    }
    net.add(std::make_unique<MaxPool2d<T>>(2, 2));
    ends.push_back(net.size());
  }
  const std::size_t fin = spec.final_channels;
  const std::size_t k = spec.final_kernel;
  const std::string last = "block" + std::to_string(spec.block_channels.size() + 1);
  auto conv_a = std::make_unique<Conv2d<T>>(in, fin, k, 1, k / 2, 0, last + ".conv1");
  conv_a->init_he_uniform(rng);
  net.add(std::move(conv_a));
  net.add(std::make_unique<ReLU<T>>());
  net.add(std::make_unique<AvgPoolTime<T>>(2));
  auto conv_b = std::make_unique<Conv2d<T>>(fin, fin, k, 1, k / 2, 0, last + ".conv2");
  conv_b->init_he_uniform(rng);
  net.add(std::move(conv_b));
  net.add(std::make_unique<GlobalAvgPoolTime<T>>());
  ends.push_back(net.size());
  return Embedder(spec, std::move(net), std::move(ends));
}

template <typename T>
void Embedder<T>::set_frozen(bool frozen) {
  frozen_ = frozen;
  net_.set_frozen(frozen);
}

template <typename T>
Tensor4<T> Embedder<T>::forward(const Tensor4<T>& features) const {
  const Shape4& s = features.shape();
  if (s.channels != 1 || s.freq != spec_.n_mels) {
    throw ShapeError("embedder expects (B,1,T," + std::to_string(spec_.n_mels) + ") input, got " +
                     s.str());
  }
  return net_.forward(features);
}

template <typename T>
std::vector<T> Embedder<T>::embed(const LogMelFrames& features) const {
  if (features.frames != spec_.input_frames || features.n_mels != spec_.n_mels) {
    throw ShapeError("embed expects " + std::to_string(spec_.input_frames) + "x" +
                     std::to_string(spec_.n_mels) + " features, got " +
                     std::to_string(features.frames) + "x" + std::to_string(features.n_mels));
  }
  const LogMelFrames* items[] = {&features};
  const Tensor4<T> out = forward(make_feature_batch<T>(items));
  return {out.data(), out.data() + out.size()};
}

template <typename T>
std::vector<BlockShape> Embedder<T>::trace_shapes(const Shape4& input) const {
  std::vector<BlockShape> out;
  Shape4 s = input;
  std::size_t layer = 0;
  for (std::size_t b = 0; b < block_ends_.size(); ++b) {
    for (; layer < block_ends_[b]; ++layer) s = net_.layer(layer).output_shape(s);
    out.push_back({"block" + std::to_string(b + 1), s});
  }
  return out;
}

template <typename T>
template <typename U>
Embedder<U> Embedder<T>::cast() const {
  Embedder<U> out = Embedder<U>::build(spec_, 0);
  auto src = net_.parameters();
  auto dst = out.net_.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < src[i]->numel(); ++j) {
      dst[i]->values[j] = static_cast<U>(src[i]->values[j]);
    }
  }
  out.set_frozen(frozen_);
  return out;
}

template <typename T>
void Embedder<T>::load_buffers(std::span<const std::vector<float>> buffers) {
  auto params = net_.parameters();
  if (buffers.size() != params.size()) {
    throw FormatError("expected " + std::to_string(params.size()) + " parameter buffers, got " +
                      std::to_string(buffers.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (buffers[i].size() != params[i]->numel()) {
      throw FormatError("parameter buffer " + params[i]->name + " has " +
                        std::to_string(buffers[i].size()) + " values, expected " +
                        std::to_string(params[i]->numel()));
    }
    std::transform(buffers[i].begin(), buffers[i].end(), params[i]->values.begin(),
                   [](float v) { return static_cast<T>(v); });
  }
}

template <typename T>
std::vector<std::vector<float>> Embedder<T>::export_buffers() const {
  std::vector<std::vector<float>> out;
  for (const auto* p : net_.parameters()) {
    std::vector<float> buf(p->numel());
    std::transform(p->values.begin(), p->values.end(), buf.begin(),
                   [](T v) { return static_cast<float>(v); });
    out.push_back(std::move(buf));
  }
  return out;
}

template <typename T>
Tensor4<T> make_feature_batch(std::span<const LogMelFrames* const> items) {
  if (items.empty()) throw ShapeError("empty feature batch");
  const std::size_t frames = items.front()->frames;
  const std::size_t mels = items.front()->n_mels;
  Tensor4<T> batch(Shape4{items.size(), 1, frames, mels});
  for (std::size_t b = 0; b < items.size(); ++b) {
    if (items[b]->frames != frames || items[b]->n_mels != mels) {
      throw ShapeError("feature batch items differ in shape");
    }
    std::transform(items[b]->values.begin(), items[b]->values.end(), batch.plane(b, 0),
                   [](float v) { return static_cast<T>(v); });
  }
  return batch;
}

template <typename T>
std::uint64_t parameter_fingerprint(const Sequential<T>& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto* p : net.parameters()) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p->values.data());
    for (std::size_t i = 0; i < p->values.size() * sizeof(T); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

template class Embedder<float>;
template class Embedder<double>;
template Embedder<double> Embedder<float>::cast<double>() const;
template Embedder<float> Embedder<double>::cast<float>() const;
template Embedder<float> Embedder<float>::cast<float>() const;
template Tensor4<float> make_feature_batch<float>(std::span<const LogMelFrames* const>);
template Tensor4<double> make_feature_batch<double>(std::span<const LogMelFrames* const>);
template std::uint64_t parameter_fingerprint<float>(const Sequential<float>&);
template std::uint64_t parameter_fingerprint<double>(const Sequential<double>&);

}  // namespace kwsem
