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

#ifndef KWSEM_TENSOR_HPP_
#define KWSEM_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kwsem/error.hpp"

namespace kwsem {

// 64-byte aligned storage. Vectorised kernels peel loops by address, so the
// summation order (and the low bits of results) would otherwise depend on
// where the allocator placed a buffer.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

// (batch, channels, time, freq), row-major with freq fastest.
struct Shape4 {
  std::size_t batch = 0;
  std::size_t channels = 0;
  std::size_t time = 0;
  std::size_t freq = 0;

  std::size_t numel() const { return batch * channels * time * freq; }
  std::size_t plane() const { return time * freq; }
  bool operator==(const Shape4&) const = default;
  std::string str() const;
};

template <typename T>
class Tensor4 {
 public:
  using value_type = T;

  Tensor4() = default;
  explicit Tensor4(Shape4 shape, T fill = T(0)) : shape_(shape), data_(shape.numel(), fill) {}
  Tensor4(Shape4 shape, std::initializer_list<T> data) : Tensor4(shape, AlignedVector<T>(data)) {}
  Tensor4(Shape4 shape, const std::vector<T>& data) : Tensor4(shape, AlignedVector<T>(data.begin(), data.end())) {}
  Tensor4(Shape4 shape, AlignedVector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_.str());
    }
  }

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  AlignedVector<T>& storage() { return data_; }
  const AlignedVector<T>& storage() const { return data_; }

  std::size_t offset(std::size_t b, std::size_t c, std::size_t t, std::size_t f) const {
    return ((b * shape_.channels + c) * shape_.time + t) * shape_.freq + f;
  }
  T& at(std::size_t b, std::size_t c, std::size_t t, std::size_t f) {
    return data_[offset(b, c, t, f)];
  }
  const T& at(std::size_t b, std::size_t c, std::size_t t, std::size_t f) const {
    return data_[offset(b, c, t, f)];
  }

  // Pointer to the (time, freq) plane of one channel of one batch item.
  T* plane(std::size_t b, std::size_t c) { return data_.data() + offset(b, c, 0, 0); }
  const T* plane(std::size_t b, std::size_t c) const { return data_.data() + offset(b, c, 0, 0); }

  // Reinterpret with a new shape of equal element count.
  Tensor4 reshaped(Shape4 shape) const& {
    if (shape.numel() != shape_.numel()) throw ShapeError("reshape " + shape_.str() + " -> " + shape.str());
    return Tensor4(shape, data_);
  }
  Tensor4 reshaped(Shape4 shape) && {
    if (shape.numel() != shape_.numel()) throw ShapeError("reshape " + shape_.str() + " -> " + shape.str());
    return Tensor4(shape, std::move(data_));
  }

  bool all_finite() const;

 private:
  Shape4 shape_;
  AlignedVector<T> data_;
};

// Converts between precisions (used to run the float model in double for
// gradient checks).
template <typename To, typename From>
Tensor4<To> tensor_cast(const Tensor4<From>& src) {
  AlignedVector<To> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = static_cast<To>(src.data()[i]);
  return Tensor4<To>(src.shape(), std::move(out));
}

extern template class Tensor4<float>;
extern template class Tensor4<double>;

}  // namespace kwsem

#endif  // KWSEM_TENSOR_HPP_
