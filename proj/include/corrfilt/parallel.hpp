// Copyright 2026 the corrfilt authors
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

#ifndef CORRFILT_PARALLEL_HPP
#define CORRFILT_PARALLEL_HPP

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace corrfilt {

/// Runs body(i) for i in [0, n). body must write only to slot i of
/// preallocated output, which makes the result independent of the thread
/// count and chunking: parallelism affects speed, never values.
///
/// threads <= 1 runs inline. The first exception thrown by any worker is
/// rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        // Contiguous chunks: worker w covers [lo, hi).
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace corrfilt

#endif  // CORRFILT_PARALLEL_HPP
