#include "tsr/runtime.hpp"

#include <cstring>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

namespace tsr {

void ExecGroups::validate() const {
  if (total_workers < 1) throw std::invalid_argument("ExecGroups: total_workers must be >= 1");
  if (ts_count < 0 || ts_count > total_workers)
    throw std::invalid_argument("ExecGroups: ts_count must lie in [0, total_workers]");
  if (ts_count > 0 && tp_count() < 1)
    throw std::invalid_argument("ExecGroups: look-ahead needs at least one TP worker");
}

const char* group_name(Group g) {
  switch (g) {
    case Group::TS: return "TS";
    case Group::TP: return "TP";
    case Group::All: return "ALL";
  }
  return "?";
}

const EventRecord* EventTrace::find(const std::string& task_id) const {
  for (const auto& e : events)
    if (e.task_id == task_id) return &e;
  return nullptr;
}

void EventTrace::dump(std::ostream& os) const {
  for (const auto& e : events)
    os << e.task_id << '\t' << group_name(e.group) << '\t' << e.start << '\t' << e.end << '\n';
}

namespace {

std::string describe(const Task& t, const Region& r) {
  std::ostringstream os;
  os << t.id << " [" << r.row_begin << ',' << r.row_end << ")x[" << r.col_begin << ','
     << r.col_end << ')';
  return os.str();
}

void check_lists(const std::vector<Task>& writers, const std::vector<Task>& others) {
  for (const auto& w : writers) {
    for (const auto& wr : w.writes) {
      for (const auto& o : others) {
        for (const auto& ow : o.writes)
          if (wr.intersects(ow))
            throw PhaseConflictError("write/write overlap: " + describe(w, wr) + " vs " +
                                     describe(o, ow));
        for (const auto& orr : o.reads)
          if (wr.intersects(orr))
            throw PhaseConflictError("write/read overlap: " + describe(w, wr) + " vs " +
                                     describe(o, orr));
      }
    }
  }
}

}  // namespace

void validate_phase(const PhasePlan& plan) {
  for (const auto* list : {&plan.seq_tasks, &plan.par_tasks})
    for (const auto& t : *list)
      if (t.writes.empty()) throw PhaseConflictError("task without declared writes: " + t.id);
  check_lists(plan.seq_tasks, plan.par_tasks);
  check_lists(plan.par_tasks, plan.seq_tasks);
}

Runtime::Runtime(ExecGroups groups) : groups_(groups) {
  groups_.validate();
  all_team_ = std::make_unique<ThreadTeam>(groups_.total_workers);
  if (groups_.ts_count > 0) {
    ts_team_ = std::make_unique<ThreadTeam>(groups_.ts_count);
    tp_team_ = std::make_unique<ThreadTeam>(groups_.tp_count());
  }
}

Runtime::~Runtime() = default;

void Runtime::audit_matrix(const void* owner, Eigen::Ref<Eigen::MatrixXd> view) {
  audited_.push_back({owner, view});
}

void Runtime::clear_audit() { audited_.clear(); }

EventRecord Runtime::run_task(const Task& t, Group g, ThreadTeam& team) {
  EventRecord rec{t.id, g, 0, 0};
  std::vector<Eigen::MatrixXd> before;
  before.reserve(audited_.size());
  for (const auto& a : audited_) before.emplace_back(a.view);
  {
    std::lock_guard lock(clock_mutex_);
    rec.start = clock_++;
  }
  t.body(Workers{&team, &flops_});
  {
    std::lock_guard lock(clock_mutex_);
    rec.end = clock_++;
  }
  for (std::size_t a = 0; a < audited_.size(); ++a) {
    const auto& view = audited_[a].view;
    for (Eigen::Index j = 0; j < view.cols(); ++j) {
      for (Eigen::Index i = 0; i < view.rows(); ++i) {
        const double x = before[a](i, j);
        const double y = view(i, j);
        if (std::memcmp(&x, &y, sizeof(double)) == 0) continue;
        bool declared = false;
        for (const auto& r : t.writes)
          if (r.owner == audited_[a].owner && r.contains(i, j)) declared = true;
        if (!declared) {
          std::ostringstream os;
          os << "task " << t.id << " wrote undeclared cell (" << i << ',' << j << ')';
          throw WriteAuditError(os.str());
        }
      }
    }
  }
  return rec;
}

void Runtime::run_list(const std::vector<Task>& tasks, Group g, ThreadTeam& team,
                       std::vector<EventRecord>& out) {
  for (const auto& t : tasks) out.push_back(run_task(t, g, team));
}

EventTrace Runtime::run_phase(const PhasePlan& plan) {
  validate_phase(plan);
  EventTrace phase;
  std::vector<EventRecord> seq_events;
  std::vector<EventRecord> par_events;
  const bool serialized = groups_.ts_count == 0 || auditing() || plan.seq_tasks.empty() ||
                          plan.par_tasks.empty();
  if (serialized) {
    ThreadTeam& seq_team = groups_.ts_count == 0 || auditing() ? *all_team_ : *ts_team_;
    if (groups_.ts_count == 0 || auditing() || !plan.seq_tasks.empty()) {
      run_list(plan.seq_tasks, Group::TS, seq_team, seq_events);
    }
    ThreadTeam& par_team = groups_.ts_count == 0 || auditing() ? *all_team_ : *tp_team_;
    run_list(plan.par_tasks, Group::TP, par_team, par_events);
  } else {
    std::exception_ptr seq_error;
    std::thread seq_leader([&] {
      try {
        run_list(plan.seq_tasks, Group::TS, *ts_team_, seq_events);
      } catch (...) {
        seq_error = std::current_exception();
      }
    });
    std::exception_ptr par_error;
    try {
      run_list(plan.par_tasks, Group::TP, *tp_team_, par_events);
    } catch (...) {
      par_error = std::current_exception();
    }
    seq_leader.join();
    if (seq_error) std::rethrow_exception(seq_error);
    if (par_error) std::rethrow_exception(par_error);
  }
  barrier();
  phase.events = std::move(seq_events);
  phase.events.insert(phase.events.end(), par_events.begin(), par_events.end());
  trace_.events.insert(trace_.events.end(), phase.events.begin(), phase.events.end());
  return phase;
}

EventTrace Runtime::run_all(const std::string& label, std::vector<Task> tasks) {
  for (const auto& t : tasks)
    if (t.writes.empty()) throw PhaseConflictError("task without declared writes: " + t.id);
  (void)label;
  EventTrace phase;
  run_list(tasks, Group::All, *all_team_, phase.events);
  barrier();
  trace_.events.insert(trace_.events.end(), phase.events.begin(), phase.events.end());
  return phase;
}

void Runtime::barrier() {
  // Lists are executed synchronously and ThreadTeam::parallel_for joins its
  // helpers before returning, so reaching this point means both groups are
  // idle.  Taking the clock lock orders later ticks after earlier ones.
  std::lock_guard lock(clock_mutex_);
}

}  // namespace tsr
