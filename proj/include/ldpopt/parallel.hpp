// Copyright 2026 The ldpopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Static-chunked parallel loops. Results depend only on the index range,
// never on the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ldpopt {

namespace detail {
inline std::atomic<int>& ThreadOverride() {
  static std::atomic<int> value{0};
  return value;
}
}  // namespace detail

// 0 restores the default (LDPOPT_THREADS, then hardware concurrency).
inline void SetThreadCount(int n) { detail::ThreadOverride() = std::max(0, n); }

inline int ThreadCount() {
  if (const int n = detail::ThreadOverride(); n > 0) return n;
  if (const char* env = std::getenv("LDPOPT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs body(i) for i in [0, n). Exceptions are rethrown on the caller.
template <typename Body>
void ParallelFor(std::size_t n, Body&& body) {
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(ThreadCount()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t end = std::min(n, (w + 1) * chunk);
        for (std::size_t i = w * chunk; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Index of the largest score(i); ties go to the smallest index. Returns n
// when n == 0 or every score is NaN.
template <typename Score>
std::size_t ParallelArgMax(std::size_t n, Score&& score, double* best_value) {
  const auto workers = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(ThreadCount()), n));
  std::vector<std::size_t> best_index(workers, n);
  std::vector<double> best(workers, 0.0);
  const std::size_t chunk = n == 0 ? 0 : (n + workers - 1) / workers;
  ParallelFor(workers, [&](std::size_t w) {
    const std::size_t end = std::min(n, (w + 1) * chunk);
    for (std::size_t i = w * chunk; i < end; ++i) {
      const double v = score(i);
      if (best_index[w] == n ? !(v != v) : v > best[w]) {
        best_index[w] = i;
        best[w] = v;
      }
    }
  });
  std::size_t arg = n;
  double value = 0.0;
  for (std::size_t w = 0; w < workers; ++w) {
    if (best_index[w] == n) continue;
    if (arg == n || best[w] > value) {
      arg = best_index[w];
      value = best[w];
    }
  }
  if (best_value != nullptr) *best_value = value;
  return arg;
}

}  // namespace ldpopt
