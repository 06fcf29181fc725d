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

#ifndef KWSEM_EMBEDDER_HPP_
#define KWSEM_EMBEDDER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kwsem/features.hpp"
#include "kwsem/layers.hpp"

namespace kwsem {

// Starting at `first`, add `step` channels per block until `cap`.
std::vector<std::size_t> channel_schedule(std::size_t first, std::size_t step, std::size_t cap,
                                          std::size_t blocks);

// Architecture of the embedding CNN.
//
// Blocks 1..N (N = block_channels.size(), default 5): `convs_per_block`
// convolutions alternating 1x3 and 3x1 kernels with zero "same" padding, each
// followed by ReLU, then a 2x2 max-pool. The last block: a 5x1 convolution,
// ReLU, average pool over time (2), a second 5x1 convolution and a global
// average pool over time. Block-6 convolutions pad time by 2 so a 2 s input
// (6 frames left after five pools) survives both convolutions.
struct ArchSpec {
  std::size_t n_mels = kNumMels;
  std::size_t input_frames = kClipFrames;
  std::vector<std::size_t> block_channels = channel_schedule(24, 24, 96, 5);
  std::size_t convs_per_block = 4;
  std::size_t final_channels = 96;
  std::size_t final_kernel = 5;
  std::size_t embedding_dim = 96;

  // Block 1..N channels followed by the final block's.
  std::vector<std::size_t> full_schedule() const;

  // Throws ConfigError when pooling cannot reduce the frequency axis to 1 or
  // the time axis would vanish.
  void validate() const;

  bool operator==(const ArchSpec&) const = default;
};

// Closed-form parameter count, independent of the layer objects.
std::size_t count_parameters(const ArchSpec& spec);

struct BlockShape {
  std::string block;
  Shape4 shape;
};

template <typename T>
class Embedder {
 public:
  // Deterministic He-uniform init from `seed` (weights in declaration order).
  static Embedder build(const ArchSpec& spec, std::uint64_t seed);

  const ArchSpec& spec() const { return spec_; }
  Sequential<T>& network() { return net_; }
  const Sequential<T>& network() const { return net_; }

  std::size_t parameter_count() const { return net_.parameter_count(); }
  bool frozen() const { return frozen_; }
  void set_frozen(bool frozen);

  // (B, 1, frames, mels) -> (B, embedding_dim, 1, 1).
  Tensor4<T> forward(const Tensor4<T>& features) const;

  // Single clip -> embedding vector. Throws ShapeError unless the frames
  // match spec().input_frames x spec().n_mels.
  std::vector<T> embed(const LogMelFrames& features) const;

  // Output shape after each block for a given input.
  std::vector<BlockShape> trace_shapes(const Shape4& input) const;

  // Same architecture and parameters in another precision.
  template <typename U>
  Embedder<U> cast() const;

  // Overwrite parameters from flat float buffers in declaration order.
  void load_buffers(std::span<const std::vector<float>> buffers);
  std::vector<std::vector<float>> export_buffers() const;

 private:
  template <typename U>
  friend class Embedder;

  Embedder(ArchSpec spec, Sequential<T> net, std::vector<std::size_t> block_ends)
      : spec_(std::move(spec)), net_(std::move(net)), block_ends_(std::move(block_ends)) {}

  ArchSpec spec_;
  Sequential<T> net_;
  std::vector<std::size_t> block_ends_;  // one past the last layer of each block
  bool frozen_ = false;
};

// Stacks frames into a (B, 1, frames, mels) batch.
template <typename T>
Tensor4<T> make_feature_batch(std::span<const LogMelFrames* const> items);

// 64-bit FNV-1a over the raw bytes of every parameter buffer.
template <typename T>
std::uint64_t parameter_fingerprint(const Sequential<T>& net);

extern template class Embedder<float>;
extern template class Embedder<double>;

}  // namespace kwsem

#endif  // KWSEM_EMBEDDER_HPP_
