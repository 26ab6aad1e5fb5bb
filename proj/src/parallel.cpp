#include "rmt/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

int worker_count() {
  const char* env = std::getenv("RMT_WORKERS");
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 1) {
      throw ConfigError("RMT_WORKERS must be a positive integer, got '" +
                        std::string(env) + "'");
    }
    return static_cast<int>(value);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::int64_t block_count(std::int64_t total, std::int64_t block_size) {
  if (total <= 0) return 0;
  return (total + block_size - 1) / block_size;
}

void run_blocked(std::int64_t total, std::int64_t block_size,
                 const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body) {
  if (block_size < 1) throw DomainError("run_blocked: block_size must be >= 1");
  const std::int64_t blocks = block_count(total, block_size);
  if (blocks == 0) return;

  const auto run_block = [&](std::int64_t b) {
    const std::int64_t begin = b * block_size;
    const std::int64_t end = std::min(total, begin + block_size);
    body(b, begin, end);
  };

  const int workers = std::min<std::int64_t>(worker_count(), blocks);
  if (workers <= 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= blocks) return;
        try {
          run_block(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rmt
