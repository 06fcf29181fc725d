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

#ifndef KWSEM_LAYERS_HPP_
#define KWSEM_LAYERS_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kwsem/rng.hpp"
#include "kwsem/tensor.hpp"

namespace kwsem {

template <typename T>
struct Parameter {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<T> values;
  bool frozen = false;

  std::size_t numel() const { return values.size(); }
};

// Gradient buffers congruent with a parameter list. A frozen parameter has
// no buffer at all (std::nullopt), not a zero-filled one.
template <typename T>
struct LayerGrads {
  std::vector<std::optional<std::vector<T>>> buffers;

  static LayerGrads for_parameters(std::span<const Parameter<T>* const> params);
  void zero();
  bool congruent_with(std::span<const Parameter<T>* const> params) const;
  std::size_t present_count() const;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;
  virtual Shape4 output_shape(const Shape4& in) const = 0;

  // Pure; safe to call concurrently on shared parameters.
  virtual Tensor4<T> forward(const Tensor4<T>& x) const = 0;

  // `x` and `y` are the input/output recorded by forward. Parameter
  // gradients are accumulated into `grads` (one slot per parameter, null for
  // frozen ones). Returns dL/dx, or an empty tensor when not requested.
  virtual Tensor4<T> backward(const Tensor4<T>& x, const Tensor4<T>& y, const Tensor4<T>& dy,
                              std::span<std::vector<T>* const> grads,
                              bool need_input_grad) const = 0;

  virtual std::vector<Parameter<T>*> parameters() { return {}; }
  virtual std::vector<const Parameter<T>*> parameters() const { return {}; }

  virtual std::unique_ptr<Layer<T>> clone() const = 0;
};

// 2-D convolution over (time, freq), stride 1, zero padding (pad_time,
// pad_freq) on both sides.
template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_time,
         std::size_t kernel_freq, std::size_t pad_time, std::size_t pad_freq,
         std::string name = "conv");

  std::string kind() const override { return "conv2d"; }
  Shape4 output_shape(const Shape4& in) const override;
  Tensor4<T> forward(const Tensor4<T>& x) const override;
  Tensor4<T> backward(const Tensor4<T>& x, const Tensor4<T>& y, const Tensor4<T>& dy,
                      std::span<std::vector<T>* const> grads, bool need_input_grad) const override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }
  std::vector<const Parameter<T>*> parameters() const override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv2d>(*this); }

  // He-style uniform init scaled by fan-in; biases zero.
  void init_he_uniform(Rng& rng);

  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }
  std::size_t kernel_time() const { return kt_; }
  std::size_t kernel_freq() const { return kf_; }
  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }
  const Parameter<T>& weight() const { return weight_; }
  const Parameter<T>& bias() const { return bias_; }

 private:
  std::size_t in_, out_, kt_, kf_, pt_, pf_;
  Parameter<T> weight_;  // (out, in, kt, kf)
  Parameter<T> bias_;    // (out)
};

template <typename T>
class ReLU final : public Layer<T> {
 public:
  std::string kind() const override { return "relu"; }
  Shape4 output_shape(const Shape4& in) const override { return in; }
  Tensor4<T> forward(const Tensor4<T>& x) const override;
  Tensor4<T> backward(const Tensor4<T>& x, const Tensor4<T>& y, const Tensor4<T>& dy,
                      std::span<std::vector<T>* const> grads, bool need_input_grad) const override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ReLU>(*this); }
};

// Max pooling with window == stride over (time, freq). Trailing rows or
// columns that do not fill a window are dropped. Ties route the gradient to
// the first maximum in row-major window order.
template <typename T>
class MaxPool2d final : public Layer<T> {
 public:
  MaxPool2d(std::size_t window_time = 2, std::size_t window_freq = 2)
      : wt_(window_time), wf_(window_freq) {}

  std::string kind() const override { return "maxpool2d"; }
  Shape4 output_shape(const Shape4& in) const override;
  Tensor4<T> forward(const Tensor4<T>& x) const override;
  Tensor4<T> backward(const Tensor4<T>& x, const Tensor4<T>& y, const Tensor4<T>& dy,
                      std::span<std::vector<T>* const> grads, bool need_input_grad) const override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<MaxPool2d>(*this); }

 private:
  std::size_t wt_, wf_;
};

// Average pooling along time only (window == stride), freq must be 1.
template <typename T>
class AvgPoolTime final : public Layer<T> {
 public:
  explicit AvgPoolTime(std::size_t window = 2) : w_(window) {}

  std::string kind() const override { return "avgpool_time"; }
  Shape4 output_shape(const Shape4& in) const override;
  Tensor4<T> forward(const Tensor4<T>& x) const override;
  Tensor4<T> backward(const Tensor4<T>& x, const Tensor4<T>& y, const Tensor4<T>& dy,
                      std::span<std::vector<T>* const> grads, bool need_input_grad) const override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<AvgPoolTime>(*this); }

 private:
  std::size_t w_;
};

// Mean over the whole time axis; (B, C, T, 1) -> (B, C, 1, 1).
template <typename T>
class GlobalAvgPoolTime final : public Layer<T> {
 public:
  std::string kind() const override { return "global_avgpool_time"; }
  Shape4 output_shape(const Shape4& in) const override;
  Tensor4<T> forward(const Tensor4<T>& x) const override;
  Tensor4<T> backward(const Tensor4<T>& x, const Tensor4<T>& y, const Tensor4<T>& dy,
                      std::span<std::vector<T>* const> grads, bool need_input_grad) const override;
  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<GlobalAvgPoolTime>(*this);
  }
};

// Fully connected layer on flattened per-item features:
// (B, C, T, F) with C*T*F == in_features -> (B, out_features, 1, 1).
template <typename T>
class Linear final : public Layer<T> {
 public:
  Linear(std::size_t in_features, std::size_t out_features, std::string name = "linear");

  std::string kind() const override { return "linear"; }
  Shape4 output_shape(const Shape4& in) const override;
  Tensor4<T> forward(const Tensor4<T>& x) const override;
  Tensor4<T> backward(const Tensor4<T>& x, const Tensor4<T>& y, const Tensor4<T>& dy,
                      std::span<std::vector<T>* const> grads, bool need_input_grad) const override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }
  std::vector<const Parameter<T>*> parameters() const override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Linear>(*this); }

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }
  const Parameter<T>& weight() const { return weight_; }
  const Parameter<T>& bias() const { return bias_; }

 private:
  std::size_t in_, out_;
  Parameter<T> weight_;  // (out, in)
  Parameter<T> bias_;    // (out)
};

// Activations recorded by a training forward pass: inputs of every layer
// followed by the final output.
template <typename T>
struct Tape {
  std::vector<Tensor4<T>> activations;
  bool recorded() const { return !activations.empty(); }
  void clear() { activations.clear(); }
};

template <typename T>
class Sequential {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  void add(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }
  std::size_t size() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_[i]; }
  const Layer<T>& layer(std::size_t i) const { return *layers_[i]; }

  Shape4 output_shape(Shape4 in) const;
  Tensor4<T> forward(const Tensor4<T>& x) const;
  Tensor4<T> forward(const Tensor4<T>& x, Tape<T>& tape) const;

  // Accumulates into `grads` (congruent with parameters()). Throws
  // StateError if the tape holds no forward pass.
  Tensor4<T> backward(const Tape<T>& tape, const Tensor4<T>& dy, LayerGrads<T>& grads,
                      bool need_input_grad) const;

  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  std::size_t parameter_count() const;
  void set_frozen(bool frozen);

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

extern template struct LayerGrads<float>;
extern template struct LayerGrads<double>;
extern template class Conv2d<float>;
extern template class Conv2d<double>;
extern template class ReLU<float>;
extern template class ReLU<double>;
extern template class MaxPool2d<float>;
extern template class MaxPool2d<double>;
extern template class AvgPoolTime<float>;
extern template class AvgPoolTime<double>;
extern template class GlobalAvgPoolTime<float>;
extern template class GlobalAvgPoolTime<double>;
extern template class Linear<float>;
extern template class Linear<double>;
extern template class Sequential<float>;
extern template class Sequential<double>;

}  // namespace kwsem

#endif  // KWSEM_LAYERS_HPP_
