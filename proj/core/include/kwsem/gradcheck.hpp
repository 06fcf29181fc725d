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

#ifndef KWSEM_GRADCHECK_HPP_
#define KWSEM_GRADCHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kwsem/layers.hpp"

namespace kwsem {

struct GradCheckEntry {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  // Entries re-measured with a smaller step because [x-h, x+h] straddled a kink.
  std::size_t kinks = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;

  std::string summary() const;
};

struct GradCheckOptions {
  double step = 1e-5;
  // Denominator floor for |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // 0 checks every entry; otherwise a seeded sample of this many per buffer.
  std::size_t max_entries_per_param = 0;
  std::uint64_t seed = 0;
  // An entry that fails while its left and right one-sided differences
  // disagree has a non-differentiable point (ReLU or max-pool switch) within
  // one step. It is re-measured with step/10, at most this many times.
  std::size_t kink_refinements = 0;
};

double relative_error(double analytic, double numeric, double floor);

// Compares `analytic` against central differences of `loss` perturbing each
// entry of `params` in place (restored afterwards). Frozen parameters are
// skipped.
GradCheckReport finite_difference_check(std::span<Parameter<double>* const> params,
                                        const std::function<double()>& loss,
                                        const LayerGrads<double>& analytic, double tolerance,
                                        const GradCheckOptions& options = {});

// Convenience: random input for a single layer, loss = <random probe, output>.
GradCheckReport check_layer_gradients(Layer<double>& layer, const Shape4& input_shape,
                                      double tolerance, std::uint64_t seed,
                                      const GradCheckOptions& options = {});

}  // namespace kwsem

#endif  // KWSEM_GRADCHECK_HPP_
