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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "kwsem/adam.hpp"
#include "kwsem/classifier.hpp"
#include "kwsem/error.hpp"
#include "kwsem/layers.hpp"
#include "kwsem/loss.hpp"
#include "oracles.hpp"

namespace kwsem {
namespace {

using testing::random_tensor;
using testing::random_vector;

oracle::Dims dims_of(const Shape4& s) { return {s.batch, s.channels, s.time, s.freq}; }

std::vector<double> flat(const Tensor4<double>& t) { return {t.values().begin(), t.values().end()}; }

TEST(Conv2d, ZeroInputGivesBias) {
  Conv2d<double> conv(1, 1, 3, 3, 1, 1);
  Rng rng(1);
  conv.init_he_uniform(rng);
  conv.bias().values[0] = 0.75;
  const auto y = conv.forward(Tensor4<double>(Shape4{1, 1, 4, 4}));
  for (const double v : y.values()) EXPECT_DOUBLE_EQ(v, 0.75);
}

TEST(Conv2d, IdentityKernelCopiesInput) {
  Conv2d<double> conv(1, 1, 1, 3, 0, 1);
  conv.weight().values = {0.0, 1.0, 0.0};
  conv.bias().values = {0.0};
  Rng rng(2);
  const auto x = random_tensor<double>(Shape4{1, 1, 5, 6}, rng);
  const auto y = conv.forward(x);
  ASSERT_EQ(y.shape(), x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(y.data()[i], x.data()[i]);
}

TEST(Conv2d, MatchesNestedLoopOracle) {
  Rng rng(3);
  Conv2d<double> conv(2, 3, 3, 1, 1, 0);
  conv.weight().values = random_vector(conv.weight().numel(), rng);
  conv.bias().values = random_vector(3, rng);
  const auto x = random_tensor<double>(Shape4{1, 2, 6, 6}, rng);
  oracle::Dims yd;
  const auto ref = oracle::conv2d(flat(x), dims_of(x.shape()), conv.weight().values, 3, 3, 1,
                                  conv.bias().values, 1, 0, &yd);
  const auto y = conv.forward(x);
  ASSERT_EQ(y.size(), ref.size());
  EXPECT_EQ(y.shape(), (Shape4{yd.b, yd.c, yd.t, yd.f}));
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.data()[i], ref[i], 1e-9);
}

TEST(Conv2d, FloatMatchesOracleOnRandomShapes) {
  Rng rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t in = 1 + rng.below(3), out = 1 + rng.below(4);
    const std::size_t kt = 1 + rng.below(3), kf = 1 + rng.below(3);
    const std::size_t pt = rng.below(kt), pf = rng.below(kf);
    const Shape4 s{1 + rng.below(2), in, kt + rng.below(6), kf + rng.below(6)};
    Conv2d<float> conv(in, out, kt, kf, pt, pf);
    const auto w = random_vector(conv.weight().numel(), rng);
    const auto b = random_vector(out, rng);
    conv.weight().values.assign(w.begin(), w.end());
    conv.bias().values.assign(b.begin(), b.end());
    const auto x = random_tensor<float>(s, rng);
    std::vector<double> xd(x.values().begin(), x.values().end());
    std::vector<double> wd(conv.weight().values.begin(), conv.weight().values.end());
    std::vector<double> bd(conv.bias().values.begin(), conv.bias().values.end());
    const auto ref = oracle::conv2d(xd, dims_of(s), wd, out, kt, kf, bd, pt, pf, nullptr);
    const auto y = conv.forward(x);
    ASSERT_EQ(y.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.data()[i], ref[i], 1e-5);
  }
}

TEST(Conv2d, RejectsChannelMismatch) {
  Conv2d<double> conv(2, 3, 3, 1, 1, 0);
  EXPECT_THROW(conv.forward(Tensor4<double>(Shape4{1, 1, 4, 4})), ShapeError);
}

TEST(MaxPool2d, SingleWindow) {
  MaxPool2d<double> pool;
  const Tensor4<double> x(Shape4{1, 1, 2, 2}, {1, 2, 3, 4});
  const auto y = pool.forward(x);
  ASSERT_EQ(y.shape(), (Shape4{1, 1, 1, 1}));
  EXPECT_EQ(y.data()[0], 4.0);
}

TEST(MaxPool2d, ConstantInput) {
  MaxPool2d<double> pool;
  const auto y = pool.forward(Tensor4<double>(Shape4{2, 3, 6, 4}, 2.5));
  for (const double v : y.values()) EXPECT_EQ(v, 2.5);
}

TEST(MaxPool2d, OddInputMatchesOracle) {
  Rng rng(5);
  MaxPool2d<double> pool;
  const auto x = random_tensor<double>(Shape4{1, 1, 5, 5}, rng);
  oracle::Dims yd;
  const auto ref = oracle::maxpool2d(flat(x), dims_of(x.shape()), 2, 2, &yd);
  const auto y = pool.forward(x);
  EXPECT_EQ(y.shape(), (Shape4{1, 1, 2, 2}));
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(y.data()[i], ref[i]);
}

TEST(MaxPool2d, TieRoutesGradientToFirstMaximum) {
  MaxPool2d<double> pool;
  const Tensor4<double> x(Shape4{1, 1, 2, 2}, {3, 3, 1, 3});
  const auto y = pool.forward(x);
  const Tensor4<double> dy(y.shape(), 1.0);
  const auto dx = pool.backward(x, y, dy, {}, true);
  EXPECT_EQ(flat(dx), (std::vector<double>{1, 0, 0, 0}));
}

TEST(GlobalAvgPoolTime, MeanOfSeries) {
  GlobalAvgPoolTime<double> pool;
  const auto y = pool.forward(Tensor4<double>(Shape4{1, 1, 3, 1}, {2, 4, 6}));
  ASSERT_EQ(y.size(), 1u);
  EXPECT_DOUBLE_EQ(y.data()[0], 4.0);
}

TEST(GlobalAvgPoolTime, SingleStepIsIdentity) {
  GlobalAvgPoolTime<double> pool;
  Rng rng(6);
  const auto x = random_tensor<double>(Shape4{2, 5, 1, 1}, rng);
  EXPECT_EQ(flat(pool.forward(x)), flat(x));
}

TEST(GlobalAvgPoolTime, MatchesMeanOracle) {
  GlobalAvgPoolTime<double> pool;
  Rng rng(7);
  const auto x = random_tensor<double>(Shape4{2, 96, 12, 1}, rng);
  const auto ref = oracle::global_avg_time(flat(x), dims_of(x.shape()));
  const auto y = pool.forward(x);
  ASSERT_EQ(y.shape(), (Shape4{2, 96, 1, 1}));
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.data()[i], ref[i], 1e-12);
}

TEST(AvgPoolTime, MatchesOracleAndDropsRemainder) {
  AvgPoolTime<double> pool(2);
  Rng rng(8);
  const auto x = random_tensor<double>(Shape4{2, 3, 7, 1}, rng);
  oracle::Dims yd;
  const auto ref = oracle::avgpool_time(flat(x), dims_of(x.shape()), 2, &yd);
  const auto y = pool.forward(x);
  EXPECT_EQ(y.shape(), (Shape4{2, 3, 3, 1}));
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.data()[i], ref[i], 1e-12);
  EXPECT_THROW(pool.forward(Tensor4<double>(Shape4{1, 1, 4, 2})), ShapeError);
}

TEST(ReLU, ForwardAndGradient) {
  ReLU<double> relu;
  const Tensor4<double> x(Shape4{1, 1, 1, 3}, {-1, 0, 2});
  const auto y = relu.forward(x);
  EXPECT_EQ(flat(y), (std::vector<double>{0, 0, 2}));
  const Tensor4<double> neg(Shape4{1, 2, 2, 2}, -3.0);
  const auto zeros = relu.forward(neg);
  for (const double v : zeros.values()) EXPECT_EQ(v, 0.0);

  const Tensor4<double> pts(Shape4{1, 1, 1, 2}, {2.0, -1.0});
  const auto out = relu.forward(pts);
  const auto dx = relu.backward(pts, out, Tensor4<double>(out.shape(), 1.0), {}, true);
  EXPECT_EQ(dx.data()[0], 1.0);
  EXPECT_EQ(dx.data()[1], 0.0);
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    const double x0 = pts.data()[i];
    const double fd = (std::max(0.0, x0 + h) - std::max(0.0, x0 - h)) / (2 * h);
    EXPECT_NEAR(dx.data()[i], fd, 1e-9);
  }
}

TEST(Linear, IdentityAndBias) {
  Linear<double> lin(4, 4);
  lin.weight().values.assign(16, 0.0);
  for (int i = 0; i < 4; ++i) lin.weight().values[static_cast<std::size_t>(i * 5)] = 1.0;
  lin.bias().values.assign(4, 0.0);
  const Tensor4<double> x(Shape4{1, 4, 1, 1}, {1, -2, 3, 0.5});
  EXPECT_EQ(flat(lin.forward(x)), flat(x));

  Rng rng(9);
  lin.bias().values = random_vector(4, rng);
  EXPECT_EQ(flat(lin.forward(Tensor4<double>(Shape4{1, 4, 1, 1}))), lin.bias().values);
}

TEST(Linear, MatchesMatvecOracle) {
  Rng rng(10);
  Linear<double> lin(7, 5);
  lin.weight().values = random_vector(35, rng);
  lin.bias().values = random_vector(5, rng);
  const auto x = random_vector(7, rng);
  const auto ref = oracle::matvec(lin.weight().values, 5, 7, x, lin.bias().values);
  const auto y = lin.forward(Tensor4<double>(Shape4{1, 7, 1, 1}, x));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(y.data()[i], ref[i], 1e-12);
}

TEST(Loss, UniformLogitsGiveLogV) {
  const std::vector<double> z(15200, 0.0);
  const auto r = softmax_cross_entropy<double>(z, 17);
  EXPECT_NEAR(r.loss, std::log(15200.0), 1e-9);
  EXPECT_NEAR(r.loss, 9.62905, 1e-5);
  for (std::size_t v : {2u, 3u, 10u, 97u}) {
    const std::vector<double> u(v, 1.5);
    EXPECT_NEAR(softmax_cross_entropy<double>(u, 0).loss, std::log(static_cast<double>(v)), 1e-6);
  }
}

TEST(Loss, NearCertainPrediction) {
  const std::vector<double> z = {10.0, -10.0};
  const auto r = softmax_cross_entropy<double>(z, 0);
  EXPECT_NEAR(r.loss, 2.061e-9, 1e-12);
  EXPECT_NEAR(r.grad[0], -2.061e-9, 1e-12);
  EXPECT_NEAR(r.grad[1], 2.061e-9, 1e-12);
}

TEST(Loss, MatchesDirectSoftmaxOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto z = random_vector(7, rng, -4, 4);
    const std::size_t target = rng.below(7);
    const auto r = softmax_cross_entropy<double>(z, target);
    EXPECT_NEAR(r.loss, oracle::cross_entropy(z, target), 1e-9);
    const auto p = oracle::softmax(z);
    double sum = 0;
    for (std::size_t i = 0; i < 7; ++i) {
      EXPECT_NEAR(r.grad[i], p[i] - (i == target ? 1.0 : 0.0), 1e-9);
      sum += p[i];
    }
    const auto s = softmax<double>(z);
    EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 1.0, 1e-12);
    for (const double v : s) EXPECT_GE(v, 0.0);
  }
}

TEST(Loss, CrossEntropyRejectsBadTarget) {
  const std::vector<double> z = {0.0, 1.0};
  EXPECT_THROW(softmax_cross_entropy<double>(z, 2), IndexError);
}

TEST(Loss, SigmoidBce) {
  auto r = sigmoid_bce<double>(0.0, 1);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.grad, -0.5, 1e-12);
  r = sigmoid_bce<double>(0.0, 0);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.grad, 0.5, 1e-12);
  r = sigmoid_bce<double>(3.0, 1);
  const double p = 1.0 / (1.0 + std::exp(-3.0));
  EXPECT_NEAR(r.loss, -std::log(p), 1e-9);
  EXPECT_NEAR(r.grad, p - 1.0, 1e-9);
  // Stable for large logits.
  EXPECT_TRUE(std::isfinite(sigmoid_bce<double>(800.0, 0).loss));
  EXPECT_NEAR(sigmoid_bce<double>(800.0, 0).loss, 800.0, 1e-9);
}

TEST(Backward, LinearCrossEntropyClosedForm) {
  Rng rng(12);
  Linear<double> lin(6, 4);
  lin.weight().values = random_vector(24, rng);
  lin.bias().values = random_vector(4, rng);
  const auto xv = random_vector(6, rng);
  const Tensor4<double> x(Shape4{1, 6, 1, 1}, xv);
  const auto y = lin.forward(x);
  Tensor4<double> dy;
  const std::vector<std::size_t> target = {2};
  batch_cross_entropy<double>(y, target, &dy);
  std::vector<double> gw(24, 0.0), gb(4, 0.0);
  std::vector<std::vector<double>*> slots = {&gw, &gb};
  lin.backward(x, y, dy, slots, false);
  const auto p = oracle::softmax(flat(y));
  for (std::size_t r = 0; r < 4; ++r) {
    const double d = p[r] - (r == 2 ? 1.0 : 0.0);
    EXPECT_NEAR(gb[r], d, 1e-9);
    for (std::size_t c = 0; c < 6; ++c) EXPECT_NEAR(gw[r * 6 + c], d * xv[c], 1e-9);
  }
}

TEST(Backward, FrozenEmbedderSkipsItsGradients) {
  ArchSpec spec;
  spec.n_mels = 8;
  spec.input_frames = 16;
  spec.block_channels = {3, 4, 5};
  spec.convs_per_block = 2;
  spec.final_channels = 6;
  spec.final_kernel = 3;
  spec.embedding_dim = 6;
  Rng rng(13);
  Linear<double> head(6, 3);
  head.weight().values = random_vector(18, rng);
  head.bias().values = random_vector(3, rng);
  const auto x = random_tensor<double>(Shape4{2, 1, 16, 8}, rng);
  const std::vector<std::size_t> targets = {0, 2};

  ClassifierModel<double> live(Embedder<double>::build(spec, 5), head);
  ClassifierModel<double> frozen(Embedder<double>::build(spec, 5), head);
  frozen.embedder().set_frozen(true);
  auto g_live = live.make_grads();
  auto g_frozen = frozen.make_grads();
  live.loss_and_grad(x, targets, g_live);
  frozen.loss_and_grad(x, targets, g_frozen);
  const std::size_t n = g_live.buffers.size();
  EXPECT_EQ(g_frozen.present_count(), 2u);
  for (std::size_t i = 0; i + 2 < n; ++i) EXPECT_FALSE(g_frozen.buffers[i].has_value());
  for (std::size_t i = n - 2; i < n; ++i) {
    ASSERT_TRUE(g_frozen.buffers[i].has_value());
    for (std::size_t j = 0; j < g_live.buffers[i]->size(); ++j) {
      EXPECT_NEAR((*g_frozen.buffers[i])[j], (*g_live.buffers[i])[j], 1e-6);
    }
  }
}

TEST(Adam, FirstStepIsLearningRate) {
  Parameter<double> p{"p", {5}, std::vector<double>(5, 0.3)};
  std::vector<Parameter<double>*> params = {&p};
  std::vector<const Parameter<double>*> cparams = {&p};
  auto state = AdamState<double>::for_parameters(cparams, 1e-3);
  auto grads = LayerGrads<double>::for_parameters(cparams);
  grads.buffers[0]->assign(5, 1.0);
  adam_step<double>(params, grads, state);
  for (const double v : p.values) EXPECT_NEAR(v - 0.3, -1e-3, 1e-10);
  EXPECT_EQ(state.step_count, 1u);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Parameter<double> p{"p", {3}, {1.0, -2.0, 0.5}};
  std::vector<Parameter<double>*> params = {&p};
  std::vector<const Parameter<double>*> cparams = {&p};
  auto state = AdamState<double>::for_parameters(cparams, 1e-2);
  auto grads = LayerGrads<double>::for_parameters(cparams);
  adam_step<double>(params, grads, state);
  EXPECT_EQ(p.values, (std::vector<double>{1.0, -2.0, 0.5}));
}

TEST(Adam, ScalarQuadraticMatchesReference) {
  Parameter<double> p{"x", {1}, {0.0}};
  std::vector<Parameter<double>*> params = {&p};
  std::vector<const Parameter<double>*> cparams = {&p};
  auto state = AdamState<double>::for_parameters(cparams, 0.1);
  auto grads = LayerGrads<double>::for_parameters(cparams);
  oracle::ScalarAdam ref;
  ref.lr = 0.1;
  double x = 0.0;
  for (int step = 0; step < 3; ++step) {
    (*grads.buffers[0])[0] = 2.0 * (p.values[0] - 3.0);
    adam_step<double>(params, grads, state);
    x = ref.step(x, 2.0 * (x - 3.0));
    EXPECT_NEAR(p.values[0], x, 1e-12);
  }
}

TEST(Adam, FrozenParameterUntouched) {
  Parameter<double> a{"a", {2}, {1.0, 1.0}};
  Parameter<double> b{"b", {2}, {1.0, 1.0}, true};
  std::vector<Parameter<double>*> params = {&a, &b};
  std::vector<const Parameter<double>*> cparams = {&a, &b};
  auto state = AdamState<double>::for_parameters(cparams, 0.1);
  auto grads = LayerGrads<double>::for_parameters(cparams);
  EXPECT_FALSE(grads.buffers[1].has_value());
  grads.buffers[0]->assign(2, 1.0);
  adam_step<double>(params, grads, state);
  EXPECT_NE(a.values[0], 1.0);
  EXPECT_EQ(b.values, (std::vector<double>{1.0, 1.0}));
}

TEST(Forward, DeterministicBitwise) {
  Rng rng(14);
  Conv2d<float> conv(2, 4, 3, 1, 1, 0);
  conv.init_he_uniform(rng);
  const auto x = random_tensor<float>(Shape4{3, 2, 9, 5}, rng);
  const auto a = conv.forward(x);
  const auto b = conv.forward(x);
  EXPECT_EQ(a.storage(), b.storage());
}

}  // namespace
}  // namespace kwsem
