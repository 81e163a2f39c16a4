#include "isl/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace isl {

namespace {
std::atomic<int> g_workers{0};
}

int worker_count() {
  const int n = g_workers.load();
  if (n > 0) return n;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void set_worker_count(int n) { g_workers.store(std::max(0, n)); }

}  // namespace isl
