#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace blowup {

/// Worker count from BLOWUP_LAB_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Compensated (Neumaier) accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Sums `width` series term-by-term over i in [0, count). `terms(i, out)` writes
/// the i-th contribution of every series into out. Blocks have a fixed size and
/// are merged in order, so the result does not depend on the thread count.
std::vector<double> parallel_sums(std::size_t count, std::size_t width,
                                  const std::function<void(std::size_t, std::span<double>)>& terms);

double parallel_sum(std::size_t count, const std::function<double(std::size_t)>& term);

}  // namespace blowup
