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

#include "kwsem/tensor.hpp"

#include <cmath>

namespace kwsem {

std::string Shape4::str() const {
  return "(" + std::to_string(batch) + "," + std::to_string(channels) + "," +
         std::to_string(time) + "," + std::to_string(freq) + ")";
}

template <typename T>
bool Tensor4<T>::all_finite() const {
  for (const T v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template class Tensor4<float>;
template class Tensor4<double>;

}  // namespace kwsem
