#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace isl {

/// Worker count used by parallel_map (defaults to hardware concurrency).
int worker_count();
void set_worker_count(int n);

namespace detail {
inline thread_local bool inside_worker = false;
}

/// Evaluates f(0..n-1) on the worker pool; result i is f(i) regardless of
/// scheduling. The first exception thrown by any task is rethrown. Calls made
/// from inside a worker run serially on that worker.
template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1 || detail::inside_worker) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      detail::inside_worker = true;
      for (std::size_t i = w; i < n; i += workers) {
        try {
          out[i] = f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  threads.clear();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace isl
