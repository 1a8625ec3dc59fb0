#ifndef OUTAGE_DETAIL_PARALLEL_HPP
#define OUTAGE_DETAIL_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace outage::detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into `chunks` contiguous ranges whose boundaries depend
/// only on n and chunks, never on the number of workers.
inline std::vector<std::pair<std::size_t, std::size_t>> split_range(
    std::size_t n, std::size_t chunks) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t c = 0; c < chunks; ++c) {
    out.emplace_back(n * c / chunks, n * (c + 1) / chunks);
  }
  return out;
}

/// Runs body(task) for task in [0, tasks) on up to `threads` workers.
/// Each task writes only to its own output slot, so results do not depend
/// on scheduling.
template <class Body>
void parallel_tasks(std::size_t tasks, unsigned threads, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), tasks));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) body(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < tasks; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace outage::detail

#endif  // OUTAGE_DETAIL_PARALLEL_HPP
