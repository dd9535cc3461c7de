#pragma once

// Static look-ahead execution: a fixed worker pool split into a sequential
// group (TS) and a parallel group (TP).  Each phase runs one ordered task
// list per group concurrently and ends with a barrier.  Tasks declare the
// matrix blocks they write (and optionally read); a phase whose lists could
// race is rejected before anything runs.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsr/thread_team.hpp"

namespace tsr {

struct ExecGroups {
  int total_workers = 2;
  int ts_count = 1;  ///< 0: no look-ahead, both lists run back-to-back on the full pool

  int tp_count() const { return total_workers - ts_count; }
  void validate() const;
};

/// Half-open block [row_begin, row_end) x [col_begin, col_end) of the
/// matrix identified by owner.
struct Region {
  const void* owner = nullptr;
  std::ptrdiff_t row_begin = 0, row_end = 0, col_begin = 0, col_end = 0;

  bool empty() const { return row_begin >= row_end || col_begin >= col_end; }
  bool intersects(const Region& o) const {
    return owner == o.owner && !empty() && !o.empty() && row_begin < o.row_end &&
           o.row_begin < row_end && col_begin < o.col_end && o.col_begin < col_end;
  }
  bool contains(std::ptrdiff_t r, std::ptrdiff_t c) const {
    return row_begin <= r && r < row_end && col_begin <= c && c < col_end;
  }
};

/// Region covering a whole object (workspace buffers, factor sets).
inline Region whole(const void* owner) { return {owner, 0, 1, 0, 1}; }

struct Task {
  std::string id;
  std::vector<Region> writes;
  std::vector<Region> reads;
  std::function<void(const Workers&)> body;
};

struct PhasePlan {
  std::string label;
  std::vector<Task> seq_tasks;
  std::vector<Task> par_tasks;
};

enum class Group { TS, TP, All };
const char* group_name(Group g);

struct EventRecord {
  std::string task_id;
  Group group = Group::All;
  std::uint64_t start = 0;
  std::uint64_t end = 0;
};

struct EventTrace {
  std::vector<EventRecord> events;

  const EventRecord* find(const std::string& task_id) const;
  /// One line per event: task_id<TAB>group<TAB>start<TAB>end.
  void dump(std::ostream& os) const;
};

class PhaseConflictError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Thrown by run_phase when write auditing finds a task that modified cells
/// outside its declared write regions.
class WriteAuditError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Throws PhaseConflictError if a task lacks write declarations or if a write
/// of one list intersects a read or write of the other list.
void validate_phase(const PhasePlan& plan);

class Runtime {
public:
  explicit Runtime(ExecGroups groups);
  ~Runtime();

  const ExecGroups& groups() const { return groups_; }

  /// Runs seq_tasks in order on TS while par_tasks run in order on TP and
  /// returns after both lists completed.  With ts_count = 0 the two lists run
  /// back-to-back on the whole pool.  Events are appended to trace().
  EventTrace run_phase(const PhasePlan& plan);

  /// Runs tasks in order on the whole pool (a phase with no TS list).
  EventTrace run_all(const std::string& label, std::vector<Task> tasks);

  /// Waits until no task of either group is in flight.  run_phase already
  /// ends with this barrier; it is exposed for callers composing phases.
  void barrier();

  FlopCounter& flops() { return flops_; }
  FlopSnapshot snapshot_flops() const { return flops_.snapshot(); }
  void reset_flops() { flops_.reset(); }

  const EventTrace& trace() const { return trace_; }
  void clear_trace() { trace_.events.clear(); }

  /// Write auditing: matrices registered here are compared cell by cell
  /// before and after every task, and a change outside the task's declared
  /// writes raises WriteAuditError.  Audited phases run serialized.
  void audit_matrix(const void* owner, Eigen::Ref<Eigen::MatrixXd> view);
  void clear_audit();
  bool auditing() const { return !audited_.empty(); }

private:
  EventRecord run_task(const Task& t, Group g, ThreadTeam& team);
  void run_list(const std::vector<Task>& tasks, Group g, ThreadTeam& team,
                std::vector<EventRecord>& out);

  struct Audited {
    const void* owner;
    Eigen::Ref<Eigen::MatrixXd> view;
  };

  ExecGroups groups_;
  std::unique_ptr<ThreadTeam> ts_team_;
  std::unique_ptr<ThreadTeam> tp_team_;
  std::unique_ptr<ThreadTeam> all_team_;
  FlopCounter flops_;
  EventTrace trace_;
  std::mutex clock_mutex_;
  std::uint64_t clock_ = 0;
  std::vector<Audited> audited_;
};

}  // namespace tsr
