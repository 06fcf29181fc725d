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

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "kwsem/adam.hpp"
#include "kwsem/audio.hpp"
#include "kwsem/classifier.hpp"
#include "kwsem/embedder.hpp"
#include "kwsem/features.hpp"
#include "kwsem/layers.hpp"
#include "kwsem/rng.hpp"

namespace kwsem {
namespace {

AudioClip chirp() {
  AudioClip clip;
  for (std::size_t n = 0; n < kClipSamples; ++n) {
    const double t = static_cast<double>(n) / kSampleRate;
    clip.samples.push_back(static_cast<float>(0.3 * std::sin(2.0 * std::numbers::pi * (200.0 + 1500.0 * t) * t)));
  }
  return clip;
}

Tensor4<float> random_input(std::size_t batch, std::size_t channels, std::size_t time, std::size_t freq) {
  Rng rng(1);
  Tensor4<float> x(Shape4{batch, channels, time, freq});
  for (auto& v : x.values()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return x;
}

void BM_LogMel(benchmark::State& state) {
  const AudioClip clip = chirp();
  for (auto _ : state) benchmark::DoNotOptimize(log_mel(clip));
}
BENCHMARK(BM_LogMel)->Unit(benchmark::kMicrosecond);

void BM_ConvForward(benchmark::State& state) {
  const auto ch = static_cast<std::size_t>(state.range(0));
  Conv2d<float> conv(ch, ch, 1, 3, 0, 1);
  Rng rng(2);
  conv.init_he_uniform(rng);
  const auto x = random_input(8, ch, 49, 10);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
}
BENCHMARK(BM_ConvForward)->Arg(24)->Arg(48)->Arg(96)->Unit(benchmark::kMicrosecond);

void BM_EmbedClip(benchmark::State& state) {
  const auto emb = Embedder<float>::build(ArchSpec{}, 3);
  const LogMelFrames features = log_mel(chirp());
  for (auto _ : state) benchmark::DoNotOptimize(emb.embed(features));
}
BENCHMARK(BM_EmbedClip)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const ArchSpec spec;
  ClassifierModel<float> model(Embedder<float>::build(spec, 4), Linear<float>(spec.embedding_dim, 10));
  const auto x = random_input(batch, 1, spec.input_frames, spec.n_mels);
  std::vector<std::size_t> targets(batch);
  for (std::size_t i = 0; i < batch; ++i) targets[i] = i % 10;
  auto params = model.parameters();
  const std::vector<const Parameter<float>*> cparams(params.begin(), params.end());
  auto state_adam = AdamState<float>::for_parameters(cparams, 1e-3);
  for (auto _ : state) {
    auto grads = model.make_grads();
    benchmark::DoNotOptimize(model.loss_and_grad(x, targets, grads));
    adam_step<float>(params, grads, state_adam);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * batch));
}
BENCHMARK(BM_TrainStep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kwsem

BENCHMARK_MAIN();
