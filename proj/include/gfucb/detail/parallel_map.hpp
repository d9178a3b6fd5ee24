#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace gfucb::cli {

template <class Result, class Fn>
std::vector<Result> parallel_map(int count, int jobs, Fn fn) {
  std::vector<std::optional<Result>> slots(static_cast<std::size_t>(std::max(count, 0)));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const int idx = next.fetch_add(1);
      if (idx >= count) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        slots[static_cast<std::size_t>(idx)].emplace(fn(idx));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Result> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace gfucb::cli
