#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gdm {

/// Thread count from an explicit request, else GDM_THREADS, else 1.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; results must be written to index-addressed slots.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gdm
