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

#include "kwsem/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kwsem/error.hpp"
#include "kwsem/rng.hpp"

namespace kwsem {

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " max_rel_error=" << max_rel_error
     << " tolerance=" << tolerance;
  for (const auto& e : entries) {
    os << "\n  " << e.name << " checked=" << e.checked << " max_rel_error=" << e.max_rel_error;
    if (e.kinks > 0) os << " kinks=" << e.kinks;
  }
  return os.str();
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

std::vector<std::size_t> pick_entries(std::size_t n, std::size_t max_entries, Rng& rng) {
  if (max_entries == 0 || max_entries >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  auto idx = rng.sample_without_replacement(n, max_entries);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct Difference {
  double central = 0.0;
  double forward = 0.0;
  double backward = 0.0;
};

Difference differences(double& slot, const std::function<double()>& loss, double base, double h) {
  const double saved = slot;
  slot = saved + h;
  const double up = loss();
  slot = saved - h;
  const double down = loss();
  slot = saved;
  return {(up - down) / (2.0 * h), (up - base) / h, (base - down) / h};
}

// Relative error of one entry, refining the step across kinks.
double entry_error(double& slot, double analytic, const std::function<double()>& loss, double base,
                   double tolerance, const GradCheckOptions& options, std::size_t& kinks) {
  double h = options.step;
  Difference d = differences(slot, loss, base, h);
  double err = relative_error(analytic, d.central, options.floor);
  bool counted = false;
  for (std::size_t r = 0; r < options.kink_refinements && err > tolerance; ++r) {
    if (relative_error(d.forward, d.backward, options.floor) <= tolerance) break;
    if (!counted) {
      ++kinks;
      counted = true;
    }
    h /= 10.0;
    d = differences(slot, loss, base, h);
    err = relative_error(analytic, d.central, options.floor);
  }
  return err;
}

}  // namespace

GradCheckReport finite_difference_check(std::span<Parameter<double>* const> params,
                                        const std::function<double()>& loss,
                                        const LayerGrads<double>& analytic, double tolerance,
                                        const GradCheckOptions& options) {
  if (analytic.buffers.size() != params.size()) {
    throw ShapeError("gradient check: analytic gradients do not match parameter list");
  }
  Rng rng(options.seed);
  GradCheckReport report;
  report.tolerance = tolerance;
  const double base = loss();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter<double>& p = *params[i];
    if (p.frozen || !analytic.buffers[i]) continue;
    const std::vector<double>& g = *analytic.buffers[i];
    GradCheckEntry entry{p.name, 0, 0.0, 0};
    for (std::size_t j : pick_entries(p.numel(), options.max_entries_per_param, rng)) {
      entry.max_rel_error = std::max(
          entry.max_rel_error, entry_error(p.values[j], g[j], loss, base, tolerance, options, entry.kinks));
      ++entry.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(entry);
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

GradCheckReport check_layer_gradients(Layer<double>& layer, const Shape4& input_shape,
                                      double tolerance, std::uint64_t seed,
                                      const GradCheckOptions& options) {
  Rng rng(seed);
  Tensor4<double> x(input_shape);
  for (double& v : x.values()) v = rng.uniform(-1.0, 1.0);
  const Shape4 os = layer.output_shape(input_shape);
  Tensor4<double> probe(os);
  for (double& v : probe.values()) v = rng.uniform(-1.0, 1.0);

  auto loss = [&]() {
    const Tensor4<double> y = layer.forward(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += y.data()[i] * probe.data()[i];
    return acc;
  };

  auto params = layer.parameters();
  std::vector<const Parameter<double>*> cparams(params.begin(), params.end());
  LayerGrads<double> grads = LayerGrads<double>::for_parameters(cparams);
  std::vector<std::vector<double>*> slots;
  for (auto& b : grads.buffers) slots.push_back(b ? &*b : nullptr);
  const Tensor4<double> y = layer.forward(x);
  const Tensor4<double> dx = layer.backward(x, y, probe, slots, true);

  GradCheckReport report = finite_difference_check(params, loss, grads, tolerance, options);

  GradCheckEntry input_entry{"input", 0, 0.0, 0};
  Rng pick_rng(seed ^ 0x5bd1e995ULL);
  const double base = loss();
  for (std::size_t j : pick_entries(x.size(), options.max_entries_per_param, pick_rng)) {
    input_entry.max_rel_error =
        std::max(input_entry.max_rel_error,
                 entry_error(x.data()[j], dx.data()[j], loss, base, tolerance, options, input_entry.kinks));
    ++input_entry.checked;
  }
  report.max_rel_error = std::max(report.max_rel_error, input_entry.max_rel_error);
  report.entries.push_back(input_entry);
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace kwsem
