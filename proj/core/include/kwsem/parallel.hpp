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

#ifndef KWSEM_PARALLEL_HPP_
#define KWSEM_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace kwsem {

// Worker cap: KSEM_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index runs
// exactly once; fn must only write to per-index state. The first exception
// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace kwsem

#endif  // KWSEM_PARALLEL_HPP_
