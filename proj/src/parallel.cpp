#include "bflow/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

#include "bflow/config.hpp"

namespace bflow {

namespace {

int g_thread_count = 0;  // 0 = auto

int auto_thread_count() {
  if (const char* env = std::getenv(config::kThreadsEnvVar)) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned capped = hw == 0 ? 1u : (hw > 8u ? 8u : hw);
  return static_cast<int>(capped);
}

}  // namespace

void set_thread_count(int n) { g_thread_count = n >= 1 ? n : 0; }

int thread_count() {
  return g_thread_count >= 1 ? g_thread_count : auto_thread_count();
}

void run_jobs(std::size_t n_jobs, const std::function<void(std::size_t)>& job) {
  const int workers_wanted = thread_count();
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(workers_wanted), n_jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error = nullptr;
  std::atomic<bool> failed{false};
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_jobs || failed.load()) return;
      try {
        job(i);
      } catch (...) {
        // First error wins; remaining jobs are abandoned.
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace bflow
