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

#ifndef KWSEM_ADAM_HPP_
#define KWSEM_ADAM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "kwsem/layers.hpp"

namespace kwsem {

template <typename T>
struct AdamState {
  std::uint64_t step_count = 0;
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_parameters(std::span<const Parameter<T>* const> params,
                                  double learning_rate);
};

// Bias-corrected Adam. Parameters without a gradient buffer (frozen) are
// left untouched; step_count advances by exactly one per call.
template <typename T>
void adam_step(std::span<Parameter<T>* const> params, const LayerGrads<T>& grads,
               AdamState<T>& state);

}  // namespace kwsem

#endif  // KWSEM_ADAM_HPP_
