#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace famnet {

// Fixed-size worker pool for data-parallel loops over row ranges.
//
// Work is split into one contiguous chunk per worker; every output element is
// written by exactly one worker with a fixed sequential inner loop, so results
// are bitwise identical for any worker count.
class ThreadPool {
 public:
  explicit ThreadPool(int workers) {
    if (workers < 1) workers = 1;
    for (int i = 1; i < workers; ++i) {
      threads_.emplace_back([this, i] { worker_loop(i); });
    }
  }

  ~ThreadPool() {
    {
      std::unique_lock lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()) + 1; }

  // Calls fn(begin, end) on disjoint ranges covering [0, n).
  void parallel_for(long n, const std::function<void(long, long)>& fn) {
    const int w = size();
    if (n <= 0) return;
    if (w == 1 || n < 2 * w) {
      fn(0, n);
      return;
    }
    const long chunk = (n + w - 1) / w;
    {
      std::unique_lock lk(mu_);
      job_ = &fn;
      job_n_ = n;
      job_chunk_ = chunk;
      pending_ = w - 1;
      ++epoch_;
    }
    cv_.notify_all();
    fn(0, std::min(chunk, n));  // worker 0 = calling thread
    std::unique_lock lk(mu_);
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void worker_loop(int idx) {
    long seen = 0;
    for (;;) {
      const std::function<void(long, long)>* job = nullptr;
      long n = 0, chunk = 0;
      {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return stop_ || epoch_ != seen; });
        if (stop_) return;
        seen = epoch_;
        job = job_;
        n = job_n_;
        chunk = job_chunk_;
      }
      const long b = std::min<long>(idx * chunk, n);
      const long e = std::min<long>(b + chunk, n);
      if (b < e) (*job)(b, e);
      {
        std::unique_lock lk(mu_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(long, long)>* job_ = nullptr;
  long job_n_ = 0, job_chunk_ = 0;
  long epoch_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

// Serial fallback when no pool is supplied.
inline void parallel_for(ThreadPool* pool, long n,
                         const std::function<void(long, long)>& fn) {
  if (pool) {
    pool->parallel_for(n, fn);
  } else if (n > 0) {
    fn(0, n);
  }
}

}  // namespace famnet
