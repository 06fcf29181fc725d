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

#include "kwsem/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <utility>

#include "kwsem/error.hpp"

namespace kwsem {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using CMapMat = Eigen::Map<const RowMat<T>>;

void require_grad_slots(std::size_t got, std::size_t want, const char* layer) {
  if (got != want) {
    throw ShapeError(std::string(layer) + ": expected " + std::to_string(want) +
                     " gradient slots, got " + std::to_string(got));
  }
}

}  // namespace

// LayerGrads -----------------------------------------------------------------

template <typename T>
LayerGrads<T> LayerGrads<T>::for_parameters(std::span<const Parameter<T>* const> params) {
  LayerGrads g;
  g.buffers.reserve(params.size());
  for (const Parameter<T>* p : params) {
    if (p->frozen) {
      g.buffers.emplace_back(std::nullopt);
    } else {
      g.buffers.emplace_back(std::vector<T>(p->numel(), T(0)));
    }
  }
  return g;
}

template <typename T>
void LayerGrads<T>::zero() {
  for (auto& b : buffers) {
    if (b) std::fill(b->begin(), b->end(), T(0));
  }
}

template <typename T>
bool LayerGrads<T>::congruent_with(std::span<const Parameter<T>* const> params) const {
  if (params.size() != buffers.size()) return false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->frozen != !buffers[i].has_value()) return false;
    if (buffers[i] && buffers[i]->size() != params[i]->numel()) return false;
  }
  return true;
}

template <typename T>
std::size_t LayerGrads<T>::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(buffers.begin(), buffers.end(), [](const auto& b) { return b.has_value(); }));
}

// Conv2d ---------------------------------------------------------------------

template <typename T>
Conv2d<T>::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_time,
                  std::size_t kernel_freq, std::size_t pad_time, std::size_t pad_freq,
                  std::string name)
    : in_(in_channels), out_(out_channels), kt_(kernel_time), kf_(kernel_freq),
      pt_(pad_time), pf_(pad_freq) {
  if (in_ == 0 || out_ == 0 || kt_ == 0 || kf_ == 0) {
    throw ShapeError("conv2d dimensions must be positive");
  }
  weight_.name = name + ".weight";
  weight_.dims = {out_, in_, kt_, kf_};
  weight_.values.assign(out_ * in_ * kt_ * kf_, T(0));
  bias_.name = name + ".bias";
  bias_.dims = {out_};
  bias_.values.assign(out_, T(0));
}

template <typename T>
void Conv2d<T>::init_he_uniform(Rng& rng) {
  const double fan_in = static_cast<double>(in_ * kt_ * kf_);
  const double limit = std::sqrt(6.0 / fan_in);
  for (T& w : weight_.values) w = static_cast<T>(rng.uniform(-limit, limit));
  std::fill(bias_.values.begin(), bias_.values.end(), T(0));
}

template <typename T>
Shape4 Conv2d<T>::output_shape(const Shape4& in) const {
  if (in.channels != in_) {
    throw ShapeError(weight_.name + ": input has " + std::to_string(in.channels) +
                     " channels, expected " + std::to_string(in_));
  }
  if (in.time + 2 * pt_ < kt_ || in.freq + 2 * pf_ < kf_) {
    throw ShapeError(weight_.name + ": input " + in.str() + " smaller than kernel");
  }
  return {in.batch, out_, in.time + 2 * pt_ - kt_ + 1, in.freq + 2 * pf_ - kf_ + 1};
}

namespace {

// cols(K x P), K = C*kt*kf, P = To*Fo.
template <typename T>
void im2col(const T* x, std::size_t channels, std::size_t time, std::size_t freq, std::size_t kt,
            std::size_t kf, std::size_t pt, std::size_t pf, std::size_t out_t, std::size_t out_f,
            T* cols) {
  const std::size_t plane = out_t * out_f;
  for (std::size_t c = 0; c < channels; ++c) {
    const T* xc = x + c * time * freq;
    for (std::size_t i = 0; i < kt; ++i) {
      for (std::size_t j = 0; j < kf; ++j) {
        T* row = cols + ((c * kt + i) * kf + j) * plane;
        for (std::size_t to = 0; to < out_t; ++to) {
          const std::ptrdiff_t ti = static_cast<std::ptrdiff_t>(to + i) - static_cast<std::ptrdiff_t>(pt);
          T* dst = row + to * out_f;
          if (ti < 0 || ti >= static_cast<std::ptrdiff_t>(time)) {
            std::fill(dst, dst + out_f, T(0));
            continue;
          }
          const T* src = xc + static_cast<std::size_t>(ti) * freq;
          for (std::size_t fo = 0; fo < out_f; ++fo) {
            const std::ptrdiff_t fi = static_cast<std::ptrdiff_t>(fo + j) - static_cast<std::ptrdiff_t>(pf);
            dst[fo] = (fi < 0 || fi >= static_cast<std::ptrdiff_t>(freq)) ? T(0) : src[fi];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, std::size_t channels, std::size_t time, std::size_t freq,
                std::size_t kt, std::size_t kf, std::size_t pt, std::size_t pf, std::size_t out_t,
                std::size_t out_f, T* dx) {
  const std::size_t plane = out_t * out_f;
  for (std::size_t c = 0; c < channels; ++c) {
    T* dxc = dx + c * time * freq;
    for (std::size_t i = 0; i < kt; ++i) {
      for (std::size_t j = 0; j < kf; ++j) {
        const T* row = cols + ((c * kt + i) * kf + j) * plane;
        for (std::size_t to = 0; to < out_t; ++to) {
          const std::ptrdiff_t ti = static_cast<std::ptrdiff_t>(to + i) - static_cast<std::ptrdiff_t>(pt);
          if (ti < 0 || ti >= static_cast<std::ptrdiff_t>(time)) continue;
          T* dst = dxc + static_cast<std::size_t>(ti) * freq;
          const T* src = row + to * out_f;
          for (std::size_t fo = 0; fo < out_f; ++fo) {
            const std::ptrdiff_t fi = static_cast<std::ptrdiff_t>(fo + j) - static_cast<std::ptrdiff_t>(pf);
            if (fi >= 0 && fi < static_cast<std::ptrdiff_t>(freq)) dst[fi] += src[fo];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor4<T> Conv2d<T>::forward(const Tensor4<T>& x) const {
  const Shape4 in = x.shape();
  const Shape4 os = output_shape(in);
  Tensor4<T> y(os);
  const std::size_t k = in_ * kt_ * kf_;
  const std::size_t p = os.time * os.freq;
  AlignedVector<T> cols(k * p);
  CMapMat<T> w(weight_.values.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(k));
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias_.values.data(),
                                                          static_cast<Eigen::Index>(out_));
  for (std::size_t n = 0; n < in.batch; ++n) {
    im2col(x.plane(n, 0), in_, in.time, in.freq, kt_, kf_, pt_, pf_, os.time, os.freq, cols.data());
    CMapMat<T> c(cols.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p));
    MapMat<T> out(y.plane(n, 0), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(p));
    out.noalias() = w * c;
    out.colwise() += b;
  }
  return y;
}

template <typename T>
Tensor4<T> Conv2d<T>::backward(const Tensor4<T>& x, const Tensor4<T>& /*y*/, const Tensor4<T>& dy,
                               std::span<std::vector<T>* const> grads,
                               bool need_input_grad) const {
  require_grad_slots(grads.size(), 2, "conv2d");
  const Shape4 in = x.shape();
  const Shape4 os = output_shape(in);
  if (dy.shape() != os) throw ShapeError(weight_.name + ": gradient shape " + dy.shape().str());
  const std::size_t k = in_ * kt_ * kf_;
  const std::size_t p = os.time * os.freq;
  const auto ek = static_cast<Eigen::Index>(k);
  const auto ep = static_cast<Eigen::Index>(p);
  const auto eo = static_cast<Eigen::Index>(out_);
  std::vector<T>* gw = grads[0];
  std::vector<T>* gb = grads[1];
  Tensor4<T> dx;
  if (need_input_grad) dx = Tensor4<T>(in);
  if (gw == nullptr && gb == nullptr && !need_input_grad) return dx;

  AlignedVector<T> cols(k * p);
  CMapMat<T> w(weight_.values.data(), eo, ek);
  for (std::size_t n = 0; n < in.batch; ++n) {
    CMapMat<T> d(dy.plane(n, 0), eo, ep);
    if (gw != nullptr) {
      im2col(x.plane(n, 0), in_, in.time, in.freq, kt_, kf_, pt_, pf_, os.time, os.freq, cols.data());
      CMapMat<T> c(cols.data(), ek, ep);
      MapMat<T> g(gw->data(), eo, ek);
      g.noalias() += d * c.transpose();
    }
    if (gb != nullptr) {
      const T* src = dy.plane(n, 0);
      for (std::size_t o = 0; o < out_; ++o) {
        T acc = T(0);
        for (std::size_t i = 0; i < p; ++i) acc += src[o * p + i];
        (*gb)[o] += acc;
      }
    }
    if (need_input_grad) {
      MapMat<T> dc(cols.data(), ek, ep);
      dc.noalias() = w.transpose() * d;
      col2im_add(cols.data(), in_, in.time, in.freq, kt_, kf_, pt_, pf_, os.time, os.freq,
                 dx.plane(n, 0));
    }
  }
  return dx;
}

// ReLU -----------------------------------------------------------------------

template <typename T>
Tensor4<T> ReLU<T>::forward(const Tensor4<T>& x) const {
  Tensor4<T> y(x.shape());
  const T* src = x.data();
  T* dst = y.data();
  for (std::size_t i = 0; i < x.size(); ++i) dst[i] = src[i] < T(0) ? T(0) : src[i];
  return y;
}

template <typename T>
Tensor4<T> ReLU<T>::backward(const Tensor4<T>& x, const Tensor4<T>& /*y*/, const Tensor4<T>& dy,
                             std::span<std::vector<T>* const> grads, bool need_input_grad) const {
  require_grad_slots(grads.size(), 0, "relu");
  if (!need_input_grad) return {};
  if (dy.shape() != x.shape()) throw ShapeError("relu: gradient shape " + dy.shape().str());
  Tensor4<T> dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    dx.data()[i] = x.data()[i] > T(0) ? dy.data()[i] : T(0);
  }
  return dx;
}

// MaxPool2d ------------------------------------------------------------------

template <typename T>
Shape4 MaxPool2d<T>::output_shape(const Shape4& in) const {
  if (in.time < wt_ || in.freq < wf_ || in.numel() == 0) {
    throw ShapeError("maxpool2d: input " + in.str() + " smaller than window");
  }
  return {in.batch, in.channels, in.time / wt_, in.freq / wf_};
}

template <typename T>
Tensor4<T> MaxPool2d<T>::forward(const Tensor4<T>& x) const {
  const Shape4 in = x.shape();
  const Shape4 os = output_shape(in);
  Tensor4<T> y(os);
  for (std::size_t n = 0; n < in.batch; ++n) {
    for (std::size_t c = 0; c < in.channels; ++c) {
      const T* src = x.plane(n, c);
      T* dst = y.plane(n, c);
      for (std::size_t to = 0; to < os.time; ++to) {
        for (std::size_t fo = 0; fo < os.freq; ++fo) {
          T best = src[(to * wt_) * in.freq + fo * wf_];
          for (std::size_t i = 0; i < wt_; ++i) {
            for (std::size_t j = 0; j < wf_; ++j) {
              best = std::max(best, src[(to * wt_ + i) * in.freq + fo * wf_ + j]);
            }
          }
          dst[to * os.freq + fo] = best;
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor4<T> MaxPool2d<T>::backward(const Tensor4<T>& x, const Tensor4<T>& /*y*/,
                                  const Tensor4<T>& dy, std::span<std::vector<T>* const> grads,
                                  bool need_input_grad) const {
  require_grad_slots(grads.size(), 0, "maxpool2d");
  if (!need_input_grad) return {};
  const Shape4 in = x.shape();
  const Shape4 os = output_shape(in);
  if (dy.shape() != os) throw ShapeError("maxpool2d: gradient shape " + dy.shape().str());
  Tensor4<T> dx(in);
  for (std::size_t n = 0; n < in.batch; ++n) {
    for (std::size_t c = 0; c < in.channels; ++c) {
      const T* src = x.plane(n, c);
      const T* g = dy.plane(n, c);
      T* dst = dx.plane(n, c);
      for (std::size_t to = 0; to < os.time; ++to) {
        for (std::size_t fo = 0; fo < os.freq; ++fo) {
          std::size_t arg = (to * wt_) * in.freq + fo * wf_;
          for (std::size_t i = 0; i < wt_; ++i) {
            for (std::size_t j = 0; j < wf_; ++j) {
              const std::size_t idx = (to * wt_ + i) * in.freq + fo * wf_ + j;
              if (src[idx] > src[arg]) arg = idx;
            }
          }
          dst[arg] += g[to * os.freq + fo];
        }
      }
    }
  }
  return dx;
}

// AvgPoolTime ----------------------------------------------------------------

template <typename T>
Shape4 AvgPoolTime<T>::output_shape(const Shape4& in) const {
  if (in.freq != 1) throw ShapeError("avgpool_time: freq dim must be 1, got " + in.str());
  if (in.time < w_) throw ShapeError("avgpool_time: input " + in.str() + " shorter than window");
  return {in.batch, in.channels, in.time / w_, 1};
}

template <typename T>
Tensor4<T> AvgPoolTime<T>::forward(const Tensor4<T>& x) const {
  const Shape4 in = x.shape();
  const Shape4 os = output_shape(in);
  Tensor4<T> y(os);
  const T scale = T(1) / static_cast<T>(w_);
  for (std::size_t n = 0; n < in.batch; ++n) {
    for (std::size_t c = 0; c < in.channels; ++c) {
      const T* src = x.plane(n, c);
      T* dst = y.plane(n, c);
      for (std::size_t to = 0; to < os.time; ++to) {
        T acc = 0;
        for (std::size_t i = 0; i < w_; ++i) acc += src[to * w_ + i];
        dst[to] = acc * scale;
      }
    }
  }
  return y;
}

template <typename T>
Tensor4<T> AvgPoolTime<T>::backward(const Tensor4<T>& x, const Tensor4<T>& /*y*/,
                                    const Tensor4<T>& dy, std::span<std::vector<T>* const> grads,
                                    bool need_input_grad) const {
  require_grad_slots(grads.size(), 0, "avgpool_time");
  if (!need_input_grad) return {};
  const Shape4 in = x.shape();
  const Shape4 os = output_shape(in);
  if (dy.shape() != os) throw ShapeError("avgpool_time: gradient shape " + dy.shape().str());
  Tensor4<T> dx(in);
  const T scale = T(1) / static_cast<T>(w_);
  for (std::size_t n = 0; n < in.batch; ++n) {
    for (std::size_t c = 0; c < in.channels; ++c) {
      const T* g = dy.plane(n, c);
      T* dst = dx.plane(n, c);
      for (std::size_t to = 0; to < os.time; ++to) {
        for (std::size_t i = 0; i < w_; ++i) dst[to * w_ + i] = g[to] * scale;
      }
    }
  }
  return dx;
}

// GlobalAvgPoolTime ----------------------------------------------------------

template <typename T>
Shape4 GlobalAvgPoolTime<T>::output_shape(const Shape4& in) const {
  if (in.freq != 1) throw ShapeError("global_avgpool_time: freq dim must be 1, got " + in.str());
  if (in.time == 0) throw ShapeError("global_avgpool_time: empty time axis");
  return {in.batch, in.channels, 1, 1};
}

template <typename T>
Tensor4<T> GlobalAvgPoolTime<T>::forward(const Tensor4<T>& x) const {
  const Shape4 in = x.shape();
  Tensor4<T> y(output_shape(in));
  for (std::size_t n = 0; n < in.batch; ++n) {
    for (std::size_t c = 0; c < in.channels; ++c) {
      const T* src = x.plane(n, c);
      T acc = 0;
      for (std::size_t t = 0; t < in.time; ++t) acc += src[t];
      y.at(n, c, 0, 0) = acc / static_cast<T>(in.time);
    }
  }
  return y;
}

template <typename T>
Tensor4<T> GlobalAvgPoolTime<T>::backward(const Tensor4<T>& x, const Tensor4<T>& /*y*/,
                                          const Tensor4<T>& dy,
                                          std::span<std::vector<T>* const> grads,
                                          bool need_input_grad) const {
  require_grad_slots(grads.size(), 0, "global_avgpool_time");
  if (!need_input_grad) return {};
  const Shape4 in = x.shape();
  if (dy.shape() != output_shape(in)) {
    throw ShapeError("global_avgpool_time: gradient shape " + dy.shape().str());
  }
  Tensor4<T> dx(in);
  const T scale = T(1) / static_cast<T>(in.time);
  for (std::size_t n = 0; n < in.batch; ++n) {
    for (std::size_t c = 0; c < in.channels; ++c) {
      const T g = dy.at(n, c, 0, 0) * scale;
      T* dst = dx.plane(n, c);
      for (std::size_t t = 0; t < in.time; ++t) dst[t] = g;
    }
  }
  return dx;
}

// Linear ---------------------------------------------------------------------

template <typename T>
Linear<T>::Linear(std::size_t in_features, std::size_t out_features, std::string name)
    : in_(in_features), out_(out_features) {
  if (in_ == 0 || out_ == 0) throw ShapeError("linear dimensions must be positive");
  weight_.name = name + ".weight";
  weight_.dims = {out_, in_};
  weight_.values.assign(out_ * in_, T(0));
  bias_.name = name + ".bias";
  bias_.dims = {out_};
  bias_.values.assign(out_, T(0));
}

template <typename T>
Shape4 Linear<T>::output_shape(const Shape4& in) const {
  const std::size_t d = in.channels * in.time * in.freq;
  if (d != in_) {
    throw ShapeError(weight_.name + ": input has " + std::to_string(d) + " features, expected " +
                     std::to_string(in_));
  }
  return {in.batch, out_, 1, 1};
}

template <typename T>
Tensor4<T> Linear<T>::forward(const Tensor4<T>& x) const {
  const Shape4 os = output_shape(x.shape());
  Tensor4<T> y(os);
  const auto eb = static_cast<Eigen::Index>(os.batch);
  CMapMat<T> xm(x.data(), eb, static_cast<Eigen::Index>(in_));
  CMapMat<T> w(weight_.values.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias_.values.data(),
                                                          static_cast<Eigen::Index>(out_));
  MapMat<T> ym(y.data(), eb, static_cast<Eigen::Index>(out_));
  ym.noalias() = xm * w.transpose();
  ym.rowwise() += b;
  return y;
}

template <typename T>
Tensor4<T> Linear<T>::backward(const Tensor4<T>& x, const Tensor4<T>& /*y*/, const Tensor4<T>& dy,
                               std::span<std::vector<T>* const> grads,
                               bool need_input_grad) const {
  require_grad_slots(grads.size(), 2, "linear");
  const Shape4 os = output_shape(x.shape());
  if (dy.shape() != os) throw ShapeError(weight_.name + ": gradient shape " + dy.shape().str());
  const auto eb = static_cast<Eigen::Index>(os.batch);
  const auto ei = static_cast<Eigen::Index>(in_);
  const auto eo = static_cast<Eigen::Index>(out_);
  CMapMat<T> xm(x.data(), eb, ei);
  CMapMat<T> d(dy.data(), eb, eo);
  if (grads[0] != nullptr) {
    MapMat<T> g(grads[0]->data(), eo, ei);
    g.noalias() += d.transpose() * xm;
  }
  if (grads[1] != nullptr) {
    std::vector<T>& g = *grads[1];
    for (std::size_t b = 0; b < os.batch; ++b) {
      for (std::size_t o = 0; o < out_; ++o) g[o] += dy.data()[b * out_ + o];
    }
  }
  Tensor4<T> dx;
  if (need_input_grad) {
    dx = Tensor4<T>(x.shape());
    CMapMat<T> w(weight_.values.data(), eo, ei);
    MapMat<T> dxm(dx.data(), eb, ei);
    dxm.noalias() = d * w;
  }
  return dx;
}

// Sequential -----------------------------------------------------------------

template <typename T>
Sequential<T>::Sequential(const Sequential& other) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

template <typename T>
Sequential<T>& Sequential<T>::operator=(const Sequential& other) {
  if (this != &other) {
    Sequential copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
Shape4 Sequential<T>::output_shape(Shape4 in) const {
  for (const auto& l : layers_) in = l->output_shape(in);
  return in;
}

template <typename T>
Tensor4<T> Sequential<T>::forward(const Tensor4<T>& x) const {
  if (layers_.empty()) return x;
  Tensor4<T> cur = layers_.front()->forward(x);
  for (std::size_t i = 1; i < layers_.size(); ++i) cur = layers_[i]->forward(cur);
  return cur;
}

template <typename T>
Tensor4<T> Sequential<T>::forward(const Tensor4<T>& x, Tape<T>& tape) const {
  tape.activations.clear();
  tape.activations.reserve(layers_.size() + 1);
  tape.activations.push_back(x);
  for (const auto& l : layers_) tape.activations.push_back(l->forward(tape.activations.back()));
  return tape.activations.back();
}

template <typename T>
Tensor4<T> Sequential<T>::backward(const Tape<T>& tape, const Tensor4<T>& dy,
                                   LayerGrads<T>& grads, bool need_input_grad) const {
  if (!tape.recorded() || tape.activations.size() != layers_.size() + 1) {
    throw StateError("backward called without a recorded forward pass");
  }
  std::vector<std::size_t> first_slot(layers_.size() + 1, 0);
  std::size_t first_trainable = layers_.size();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto params = std::as_const(*layers_[i]).parameters();
    first_slot[i + 1] = first_slot[i] + params.size();
    for (const auto* p : params) {
      if (!p->frozen && first_trainable == layers_.size()) first_trainable = i;
    }
  }
  if (grads.buffers.size() != first_slot.back()) {
    throw ShapeError("gradient buffers do not match parameter list");
  }
  const std::size_t stop = need_input_grad ? 0 : first_trainable;
  Tensor4<T> cur = dy;
  for (std::size_t i = layers_.size(); i-- > stop;) {
    std::vector<std::vector<T>*> slots;
    for (std::size_t s = first_slot[i]; s < first_slot[i + 1]; ++s) {
      slots.push_back(grads.buffers[s] ? &*grads.buffers[s] : nullptr);
    }
    const bool want_dx = i > stop || need_input_grad;
    cur = layers_[i]->backward(tape.activations[i], tape.activations[i + 1], cur, slots, want_dx);
  }
  if (!need_input_grad) return {};
  return cur;
}

template <typename T>
std::vector<Parameter<T>*> Sequential<T>::parameters() {
  std::vector<Parameter<T>*> out;
  for (auto& l : layers_) {
    for (auto* p : l->parameters()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> Sequential<T>::parameters() const {
  std::vector<const Parameter<T>*> out;
  for (const auto& l : layers_) {
    for (const auto* p : std::as_const(*l).parameters()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::size_t Sequential<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->numel();
  return n;
}

template <typename T>
void Sequential<T>::set_frozen(bool frozen) {
  for (auto* p : parameters()) p->frozen = frozen;
}

template struct LayerGrads<float>;
template struct LayerGrads<double>;
template class Conv2d<float>;
template class Conv2d<double>;
template class ReLU<float>;
template class ReLU<double>;
template class MaxPool2d<float>;
template class MaxPool2d<double>;
template class AvgPoolTime<float>;
template class AvgPoolTime<double>;
template class GlobalAvgPoolTime<float>;
template class GlobalAvgPoolTime<double>;
template class Linear<float>;
template class Linear<double>;
template class Sequential<float>;
template class Sequential<double>;

}  // namespace kwsem
