#include "blowup/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace blowup {
namespace {

constexpr std::size_t kBlock = 2048;

}  // namespace

std::size_t worker_count() {
  const char* env = std::getenv("BLOWUP_LAB_THREADS");
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (env == nullptr || *env == '\0') return hw;
  try {
    const long v = std::stol(env);
    if (v <= 0) return hw;
    return static_cast<std::size_t>(v);
  } catch (...) {
    return hw;
  }
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    carry_ += (sum_ - t) + x;
  } else {
    carry_ += (x - t) + sum_;
  }
  sum_ = t;
}

std::vector<double> parallel_sums(std::size_t count, std::size_t width,
                                  const std::function<void(std::size_t, std::span<double>)>& terms) {
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<CompensatedSum> partial(blocks * width);
  auto run_block = [&](std::size_t b) {
    std::vector<double> buf(width);
    std::vector<CompensatedSum> acc(width);
    const std::size_t end = std::min(count, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      std::fill(buf.begin(), buf.end(), 0.0);
      terms(i, buf);
      for (std::size_t k = 0; k < width; ++k) acc[k].add(buf[k]);
    }
    for (std::size_t k = 0; k < width; ++k) partial[b * width + k] = acc[k];
  };

  const std::size_t workers = std::min(worker_count(), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t b = next.fetch_add(1);
          if (b >= blocks) return;
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  std::vector<double> out(width, 0.0);
  for (std::size_t k = 0; k < width; ++k) {
    CompensatedSum total;
    for (std::size_t b = 0; b < blocks; ++b) {
      total.add(partial[b * width + k].value());
    }
    out[k] = total.value();
  }
  return out;
}

double parallel_sum(std::size_t count, const std::function<double(std::size_t)>& term) {
  return parallel_sums(count, 1, [&](std::size_t i, std::span<double> out) { out[0] = term(i); })[0];
}

}  // namespace blowup
