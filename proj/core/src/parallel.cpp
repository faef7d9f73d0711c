#include "zeta_ladder/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace zeta_ladder {

namespace {
// Nested parallel_for (from a worker, or from a body that itself
// parallelizes) runs inline; only the outermost level fans out.
thread_local bool t_inside_parallel = false;
}  // namespace

struct ThreadPool::Impl {
  explicit Impl(unsigned n) : nthreads(n == 0 ? 1 : n) {
    for (unsigned i = 1; i < nthreads; ++i) {
      workers.emplace_back([this, i] { worker_loop(i); });
    }
  }

  ~Impl() {
    {
      std::unique_lock lk(m);
      stopping = true;
    }
    cv.notify_all();
    for (auto& t : workers) t.join();
  }

  std::size_t chunk_lo(unsigned id) const { return job_n * id / nthreads; }

  void run_chunk(unsigned id, const std::function<void(std::size_t)>& work) {
    std::size_t lo = chunk_lo(id), hi = chunk_lo(id + 1);
    t_inside_parallel = true;
    try {
      for (std::size_t i = lo; i < hi; ++i) {
        if (aborting.load(std::memory_order_relaxed)) break;
        work(i);
      }
    } catch (...) {
      std::unique_lock lk(m);
      if (!first_error) first_error = std::current_exception();
      aborting.store(true, std::memory_order_relaxed);
    }
    t_inside_parallel = false;
  }

  void worker_loop(unsigned id) {
    std::uint64_t seen = 0;
    for (;;) {
      std::function<void(std::size_t)> work;
      {
        std::unique_lock lk(m);
        cv.wait(lk, [&] { return stopping || generation != seen; });
        if (stopping) return;
        seen = generation;
        work = job;
      }
      run_chunk(id, work);
      if (remaining.fetch_sub(1) == 1) {
        std::unique_lock lk2(m);
        done_cv.notify_all();
      }
    }
  }

  void run(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    if (nthreads == 1 || n < 2 * nthreads || t_inside_parallel) {
      for (std::size_t i = 0; i < n; ++i) body(i);
      return;
    }
    {
      std::unique_lock lk(m);
      job = body;
      job_n = n;
      first_error = nullptr;
      aborting.store(false);
      remaining.store(static_cast<int>(nthreads) - 1);
      ++generation;
    }
    cv.notify_all();
    run_chunk(0, body);
    std::unique_lock lk(m);
    done_cv.wait(lk, [&] { return remaining.load() == 0; });
    job = nullptr;
    if (first_error) {
      auto e = first_error;
      first_error = nullptr;
      lk.unlock();
      std::rethrow_exception(e);
    }
  }

  unsigned nthreads;
  std::vector<std::thread> workers;
  std::mutex m;
  std::condition_variable cv, done_cv;
  std::function<void(std::size_t)> job;
  std::size_t job_n = 0;
  std::uint64_t generation = 0;
  std::atomic<int> remaining{0};
  std::atomic<bool> aborting{false};
  std::exception_ptr first_error;
  bool stopping = false;
};

ThreadPool::ThreadPool(unsigned threads) : impl_(std::make_unique<Impl>(threads)) {}
ThreadPool::~ThreadPool() = default;

unsigned ThreadPool::thread_count() const { return impl_->nthreads; }

void ThreadPool::parallel_for(std::size_t n,
                              const std::function<void(std::size_t)>& body) const {
  impl_->run(n, body);
}

namespace {
double pairwise_sum_range(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum_range(v, half) + pairwise_sum_range(v + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> v) {
  return pairwise_sum_range(v.data(), v.size());
}

}  // namespace zeta_ladder
