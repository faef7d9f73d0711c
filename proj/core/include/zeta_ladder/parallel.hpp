#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>

namespace zeta_ladder {

// Fixed-size worker pool. parallel_for splits [0, n) into contiguous chunks,
// one per worker; each index is processed exactly once and writes only to
// caller-owned slots, so results do not depend on the worker count.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned threads = 1);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned thread_count() const;

  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Sum over a fixed balanced tree on the index range. The reduction order is a
// pure function of v.size(), never of scheduling, so sums are reproducible
// bit for bit.
double pairwise_sum(std::span<const double> v);

}  // namespace zeta_ladder
