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

#include "kwsem/adam.hpp"

#include <cmath>
#include <string>

#include "kwsem/error.hpp"

namespace kwsem {

template <typename T>
AdamState<T> AdamState<T>::for_parameters(std::span<const Parameter<T>* const> params,
                                          double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  for (const Parameter<T>* p : params) {
    s.first_moment.emplace_back(p->numel(), T(0));
    s.second_moment.emplace_back(p->numel(), T(0));
  }
  return s;
}

template <typename T>
void adam_step(std::span<Parameter<T>* const> params, const LayerGrads<T>& grads,
               AdamState<T>& state) {
  if (grads.buffers.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ShapeError("adam: parameter, gradient and moment lists differ in length");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads.buffers[i]) continue;
    const std::vector<T>& g = *grads.buffers[i];
    std::vector<T>& w = params[i]->values;
    std::vector<T>& m = state.first_moment[i];
    std::vector<T>& v = state.second_moment[i];
    if (g.size() != w.size() || m.size() != w.size() || v.size() != w.size()) {
      throw ShapeError("adam: buffer size mismatch for " + params[i]->name);
    }
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = b1 * m[j] + (T(1) - b1) * g[j];
      v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
      const double m_hat = static_cast<double>(m[j]) / c1;
      const double v_hat = static_cast<double>(v[j]) / c2;
      w[j] -= static_cast<T>(state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon));
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::span<Parameter<float>* const>, const LayerGrads<float>&,
                               AdamState<float>&);
template void adam_step<double>(std::span<Parameter<double>* const>, const LayerGrads<double>&,
                                AdamState<double>&);

}  // namespace kwsem
