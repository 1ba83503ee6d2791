#include "probkg/util/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace probkg {

namespace {
std::atomic<std::size_t> g_threads{0};
}

void set_thread_count(std::size_t n) noexcept { g_threads = n; }

std::size_t thread_count() noexcept {
  std::size_t n = g_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

void parallel_chunks(
    std::size_t n, std::size_t chunks,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  if (n == 0) return;
  const std::size_t step = (n + chunks - 1) / chunks;
  if (chunks == 1 || thread_count() == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t b = c * step;
      if (b >= n) break;
      fn(c, b, std::min(n, b + step));
    }
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t b = c * step;
    if (b >= n) break;
    workers.emplace_back([&, c, b] {
      try {
        fn(c, b, std::min(n, b + step));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace probkg
