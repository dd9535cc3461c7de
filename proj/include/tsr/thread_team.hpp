#pragma once

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tsr {

/// A fixed set of workers that executes index-parallel loops.  The calling
/// thread participates, so a team of size 1 owns no helper threads.
class ThreadTeam {
public:
  explicit ThreadTeam(int workers);
  ~ThreadTeam();

  ThreadTeam(const ThreadTeam&) = delete;
  ThreadTeam& operator=(const ThreadTeam&) = delete;

  int size() const { return static_cast<int>(helpers_.size()) + 1; }

  /// Runs fn(i) for every i in [0, count).  Blocks until all calls returned;
  /// the first exception thrown by any call is rethrown here.  Not reentrant.
  void parallel_for(std::ptrdiff_t count, const std::function<void(std::ptrdiff_t)>& fn);

private:
  void helper_loop();
  void drain();

  std::vector<std::thread> helpers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::ptrdiff_t)>* job_ = nullptr;
  std::ptrdiff_t count_ = 0;
  std::atomic<std::ptrdiff_t> next_{0};
  int active_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

enum class FlopClass : int { Gemm = 0, Symm, Syr2k, Panel };
inline constexpr int kFlopClasses = 4;

struct FlopSnapshot {
  std::array<std::uint64_t, kFlopClasses> by_class{};

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto v : by_class) t += v;
    return t;
  }
  std::uint64_t operator[](FlopClass c) const { return by_class[static_cast<int>(c)]; }
};

/// Thread-safe per-class flop accumulator (multiply-add counts as 2).
class FlopCounter {
public:
  void add(FlopClass c, std::uint64_t flops) {
    counts_[static_cast<int>(c)].fetch_add(flops, std::memory_order_relaxed);
  }
  FlopSnapshot snapshot() const {
    FlopSnapshot s;
    for (int i = 0; i < kFlopClasses; ++i) s.by_class[i] = counts_[i].load(std::memory_order_relaxed);
    return s;
  }
  std::uint64_t total() const { return snapshot().total(); }
  void reset() {
    for (auto& c : counts_) c.store(0, std::memory_order_relaxed);
  }

private:
  std::array<std::atomic<std::uint64_t>, kFlopClasses> counts_{};
};

/// What a kernel may use: an optional team for tiling its output and an
/// optional flop counter.  Default-constructed means serial and uncounted.
struct Workers {
  ThreadTeam* team = nullptr;
  FlopCounter* flops = nullptr;

  int size() const { return team ? team->size() : 1; }

  template <class Fn>
  void parallel_for(std::ptrdiff_t count, Fn&& fn) const {
    if (team && team->size() > 1 && count > 1) {
      team->parallel_for(count, std::function<void(std::ptrdiff_t)>(std::forward<Fn>(fn)));
    } else {
      for (std::ptrdiff_t i = 0; i < count; ++i) fn(i);
    }
  }

  void count(FlopClass c, std::uint64_t n) const {
    if (flops) flops->add(c, n);
  }
};

}  // namespace tsr
