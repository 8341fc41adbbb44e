#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace krv {

// Runs independent tasks on up to `threads` workers (0 = hardware count).
// Each task must write only to its own output slot; results are then
// identical to sequential execution no matter how tasks are scheduled.
inline void run_tasks(std::vector<std::function<void()>>& tasks, int threads) {
  if (tasks.empty()) return;
  unsigned n = (threads > 0) ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (n > tasks.size()) n = static_cast<unsigned>(tasks.size());

  if (n == 1) {
    for (auto& t : tasks) t();
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) return;
      try {
        tasks[i]();
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace krv
