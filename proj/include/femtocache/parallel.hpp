// Copyright 2026 The femtocache Authors
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

#ifndef FEMTOCACHE_PARALLEL_HPP_
#define FEMTOCACHE_PARALLEL_HPP_

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace femtocache {

// Every data-parallel kernel in the library has a serial reference path.
// Work is split into index-addressed tasks whose randomness is derived from
// the task index, so both paths produce identical results.
enum class Execution { kSerial, kParallel };

// Calls fn(i) for i in [0, n). Exceptions thrown by tasks are rethrown on the
// calling thread (the first one wins).
template <class Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::kSerial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

// Number of fixed-size chunks used to split `total` Monte Carlo draws.
inline std::size_t chunk_count(std::size_t total, std::size_t chunk) {
  return (total + chunk - 1) / chunk;
}

inline constexpr std::size_t kMonteCarloChunk = 1 << 14;

int available_threads();

}  // namespace femtocache

#endif  // FEMTOCACHE_PARALLEL_HPP_
