// Copyright 2026 The Authors.
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

#ifndef COMMITKIT_PARALLEL_H_
#define COMMITKIT_PARALLEL_H_

#include <atomic>
#include <cstdlib>
#include <thread>
#include <utility>
#include <vector>

namespace commitkit {

// Worker count: COMMITKIT_THREADS if set and positive, otherwise the
// hardware concurrency (at least 1).
inline int worker_count() {
  if (const char* env = std::getenv("COMMITKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs f(i) for i in [0, n) on a pool of worker threads. Results must be
// written to index-addressed slots so the output is independent of
// scheduling; f must not throw. With one worker this degenerates to a loop.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const int workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::size_t>(workers, n));
  pool.reserve(spawn - 1);
  for (int t = 1; t < spawn; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace commitkit

#endif  // COMMITKIT_PARALLEL_H_
