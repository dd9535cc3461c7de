#pragma once

// Symbolic task model of the SVD reductions.  Tasks carry element ranges;
// dependencies follow from range intersection, and look-ahead feasibility
// is decided on the resulting graph.

#include <cstddef>
#include <string>
#include <vector>

#include "tsr/ranges.hpp"

namespace tsr {

struct TaskNode {
  TaskKind kind = TaskKind::QRPanel;
  int iter = 0;
  int block = 0;  ///< index of the fine block within its update (0 for panels)
  std::vector<CellRange> reads;
  std::vector<CellRange> writes;

  std::string label() const;
};

enum class DepCause { RAW, WAW, WAR };
const char* dep_cause_name(DepCause c);

struct DepEdge {
  int from = 0;
  int to = 0;
  DepCause cause = DepCause::RAW;
};

struct TaskDag {
  std::vector<TaskNode> nodes;
  std::vector<DepEdge> edges;

  bool has_edge(int from, int to) const;
  bool acyclic() const;
  /// Whether a directed path from -> to exists.
  bool reaches(int from, int to) const;
};

/// Tasks of the first `iters` steps (fewer if the reduction ends sooner) in
/// program order: QR, its fine left updates (one per b-column block), LQ, its
/// fine right updates (one per b-row block).  Updates read their panel and
/// their block.
std::vector<TaskNode> enumerate_tasks(std::ptrdiff_t m, std::ptrdiff_t n, std::ptrdiff_t w,
                                      std::ptrdiff_t b, SvdForm form, int iters);

/// Edges a -> c for a before c in program order whose ranges conflict.
TaskDag build_dag(const std::vector<TaskNode>& tasks);

struct OverlapOptions {
  int max_lag = 3;
  bool fold_prerequisites = false;
};

struct OverlapReport {
  bool left_feasible = false;
  bool right_feasible = false;
  bool both_feasible = false;
  int left_lag = -1;   ///< smallest lag realizing the left overlap, -1 if none
  int right_lag = -1;
  int both_lag = -1;
  int steady_steps = 0;
};

/// Decides whether the next QR (LQ) panel can run concurrently with the
/// remaining left (right) updates of the current step.
///
/// Left and right updates commute, so a conflicting pair (left update of
/// step s, right update of step t) may run in either order.  A schedule
/// family is fixed by a lag d: the left update goes first iff s <= t + d;
/// every other conflict keeps program order.  Each acyclic orientation is a
/// legal schedule.  The left overlap holds at step t when every left update
/// of step t that the next QR panel does not touch is unordered with respect
/// to that panel (no path either way); the right overlap likewise.  Steady
/// steps are those where the step, its predecessor and the two steps after
/// it have full-width panels on both sides.  Throws std::invalid_argument
/// when the task window holds no steady step.
OverlapReport analyze_overlap(const TaskDag& dag, std::ptrdiff_t w, std::ptrdiff_t b, SvdForm form,
                              const OverlapOptions& opt = {});

/// `digraph` text with one node per task and edges labelled by cause.
std::string to_dot(const TaskDag& dag);

}  // namespace tsr
