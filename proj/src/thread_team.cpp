#include "tsr/thread_team.hpp"

#include <stdexcept>

namespace tsr {

ThreadTeam::ThreadTeam(int workers) {
  if (workers < 1) throw std::invalid_argument("ThreadTeam: need at least one worker");
  helpers_.reserve(static_cast<std::size_t>(workers - 1));
  for (int i = 1; i < workers; ++i) helpers_.emplace_back([this] { helper_loop(); });
}

ThreadTeam::~ThreadTeam() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : helpers_) t.join();
}

void ThreadTeam::drain() {
  const auto& fn = *job_;
  for (;;) {
    const std::ptrdiff_t i = next_.fetch_add(1, std::memory_order_relaxed);
    if (i >= count_) break;
    try {
      fn(i);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
}

void ThreadTeam::helper_loop() {
  std::uint64_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    drain();
    {
      std::lock_guard lock(mutex_);
      if (--active_ == 0) done_.notify_one();
    }
  }
}

void ThreadTeam::parallel_for(std::ptrdiff_t count,
                              const std::function<void(std::ptrdiff_t)>& fn) {
  if (count <= 0) return;
  if (helpers_.empty() || count == 1) {
    for (std::ptrdiff_t i = 0; i < count; ++i) fn(i);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    job_ = &fn;
    count_ = count;
    next_.store(0, std::memory_order_relaxed);
    active_ = static_cast<int>(helpers_.size());
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  drain();
  std::exception_ptr err;
  {
    std::unique_lock lock(mutex_);
    done_.wait(lock, [&] { return active_ == 0; });
    job_ = nullptr;
    err = error_;
    error_ = nullptr;
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace tsr
