#include "tsr/depgraph.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tsr {

using Idx = std::ptrdiff_t;

const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::QRPanel: return "QR";
    case TaskKind::LQPanel: return "LQ";
    case TaskKind::LeftUpdate: return "L";
    case TaskKind::RightUpdate: return "R";
  }
  return "?";
}

const char* dep_cause_name(DepCause c) {
  switch (c) {
    case DepCause::RAW: return "RAW";
    case DepCause::WAW: return "WAW";
    case DepCause::WAR: return "WAR";
  }
  return "?";
}

std::string TaskNode::label() const {
  std::string s = task_kind_name(kind) + std::to_string(iter);
  if (kind == TaskKind::LeftUpdate || kind == TaskKind::RightUpdate) s += "." + std::to_string(block);
  return s;
}

namespace {

struct Widths {
  Idx bl = 0, br = 0;
};

// Widths of the step at column k; the geometry mirrors the reductions.
Widths step_widths(Idx m, Idx n, Idx w, Idx b, SvdForm form, Idx k) {
  Widths s;
  const Idx below = form == SvdForm::Band ? m - k - w : m - k;
  if (k < n && below >= 2) s.bl = std::min({b, n - k, below - 1});
  if (s.bl > 0 && n - k - w >= 2) s.br = std::min(s.bl, n - k - w - 1);
  return s;
}

bool any_intersect(const std::vector<CellRange>& a, const std::vector<CellRange>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.intersects(y)) return true;
  return false;
}

// Cause of the dependence of `later` on `earlier`, if any.
bool conflict(const TaskNode& earlier, const TaskNode& later, DepCause* cause) {
  if (any_intersect(earlier.writes, later.reads)) {
    if (cause) *cause = DepCause::RAW;
    return true;
  }
  if (any_intersect(earlier.writes, later.writes)) {
    if (cause) *cause = DepCause::WAW;
    return true;
  }
  if (any_intersect(earlier.reads, later.writes)) {
    if (cause) *cause = DepCause::WAR;
    return true;
  }
  return false;
}

// Adjacency-list graph with bitset reachability.
class Reach {
public:
  Reach(int n, const std::vector<std::pair<int, int>>& edges) : n_(n), words_((n + 63) / 64) {
    std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    for (const auto& [a, c] : edges) {
      succ[a].push_back(c);
      ++indeg[c];
    }
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      if (indeg[i] == 0) order.push_back(i);
    for (std::size_t h = 0; h < order.size(); ++h)
      for (int c : succ[order[h]])
        if (--indeg[c] == 0) order.push_back(c);
    acyclic_ = static_cast<int>(order.size()) == n;
    if (!acyclic_) return;
    bits_.assign(static_cast<std::size_t>(n) * words_, 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int v = *it;
      for (int c : succ[v]) {
        row(v)[c / 64] |= std::uint64_t(1) << (c % 64);
        for (std::size_t k = 0; k < words_; ++k) row(v)[k] |= row(c)[k];
      }
    }
  }

  bool acyclic() const { return acyclic_; }
  bool reaches(int a, int c) const { return (row(a)[c / 64] >> (c % 64)) & 1; }
  bool ordered(int a, int c) const { return reaches(a, c) || reaches(c, a); }

private:
  std::uint64_t* row(int v) { return bits_.data() + static_cast<std::size_t>(v) * words_; }
  const std::uint64_t* row(int v) const { return bits_.data() + static_cast<std::size_t>(v) * words_; }

  int n_;
  std::size_t words_;
  bool acyclic_ = false;
  std::vector<std::uint64_t> bits_;
};

std::vector<std::pair<int, int>> edge_pairs(const TaskDag& dag) {
  std::vector<std::pair<int, int>> e;
  e.reserve(dag.edges.size());
  for (const auto& x : dag.edges) e.emplace_back(x.from, x.to);
  return e;
}

}  // namespace

std::vector<TaskNode> enumerate_tasks(Idx m, Idx n, Idx w, Idx b, SvdForm form, int iters) {
  if (m < 1 || n < 1 || m < n) throw std::invalid_argument("enumerate_tasks: need m >= n >= 1");
  if (b < 1 || b > w) throw std::invalid_argument("enumerate_tasks: need 1 <= b <= w");
  if (iters < 1) throw std::invalid_argument("enumerate_tasks: need iters >= 1");
  std::vector<TaskNode> tasks;
  Idx k = 0;
  for (int t = 0; t < iters; ++t) {
    const Widths s = step_widths(m, n, w, b, form, k);
    if (s.bl == 0) break;
    const Idx top = form == SvdForm::Band ? k + w : k;
    const CellRange qr{top, m, k, k + s.bl};
    tasks.push_back({TaskKind::QRPanel, t, 0, {qr}, {qr}});
    int blk = 0;
    for (Idx c = k + s.bl; c < n; c += b) {
      const CellRange target{top, m, c, std::min(c + b, n)};
      tasks.push_back({TaskKind::LeftUpdate, t, blk++, {qr, target}, {target}});
    }
    if (s.br > 0) {
      const CellRange lq{k, k + s.br, k + w, n};
      tasks.push_back({TaskKind::LQPanel, t, 0, {lq}, {lq}});
      blk = 0;
      for (Idx r = k + s.br; r < m; r += b) {
        const CellRange target{r, std::min(r + b, m), k + w, n};
        tasks.push_back({TaskKind::RightUpdate, t, blk++, {lq, target}, {target}});
      }
    }
    k += s.bl;
  }
  return tasks;
}

TaskDag build_dag(const std::vector<TaskNode>& tasks) {
  TaskDag dag;
  dag.nodes = tasks;
  const int n = static_cast<int>(tasks.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      DepCause cause;
      if (conflict(tasks[i], tasks[j], &cause)) dag.edges.push_back({i, j, cause});
    }
  }
  return dag;
}

bool TaskDag::has_edge(int from, int to) const {
  return std::any_of(edges.begin(), edges.end(), [&](const DepEdge& e) { return e.from == from && e.to == to; });
}

bool TaskDag::acyclic() const { return Reach(static_cast<int>(nodes.size()), edge_pairs(*this)).acyclic(); }

bool TaskDag::reaches(int from, int to) const {
  Reach r(static_cast<int>(nodes.size()), edge_pairs(*this));
  if (!r.acyclic()) throw std::logic_error("TaskDag::reaches: graph has a cycle");
  return r.reaches(from, to);
}

OverlapReport analyze_overlap(const TaskDag& dag, Idx w, Idx b, SvdForm form, const OverlapOptions& opt) {
  (void)w;
  std::vector<TaskNode> nodes = dag.nodes;
  int steps = 0;
  for (const auto& t : nodes) steps = std::max(steps, t.iter + 1);
  if (steps < 4) throw std::invalid_argument("analyze_overlap: need at least 4 steps");

  // Panel ranges before any folding.
  std::map<int, std::vector<CellRange>> qr_range, lq_range;
  std::map<int, Idx> qr_width, lq_width;
  for (const auto& t : nodes) {
    if (t.kind == TaskKind::QRPanel) {
      qr_range[t.iter] = t.writes;
      qr_width[t.iter] = t.writes.front().col_end - t.writes.front().col_begin;
    } else if (t.kind == TaskKind::LQPanel) {
      lq_range[t.iter] = t.writes;
      lq_width[t.iter] = t.writes.front().row_end - t.writes.front().row_begin;
    }
  }

  if (opt.fold_prerequisites) {
    // Move the left updates feeding the next QR panel into that panel when
    // nothing in between conflicts with them.
    for (int t = 0; t + 1 < steps; ++t) {
      auto qr_pos = std::find_if(nodes.begin(), nodes.end(), [&](const TaskNode& x) {
        return x.kind == TaskKind::QRPanel && x.iter == t + 1;
      });
      if (qr_pos == nodes.end()) continue;
      const std::size_t q = static_cast<std::size_t>(qr_pos - nodes.begin());
      std::vector<std::size_t> pre;
      for (std::size_t i = 0; i < q; ++i)
        if (nodes[i].kind == TaskKind::LeftUpdate && nodes[i].iter == t &&
            any_intersect(nodes[i].writes, qr_range[t + 1]))
          pre.push_back(i);
      bool movable = !pre.empty();
      for (std::size_t p : pre)
        for (std::size_t i = p + 1; i < q && movable; ++i)
          if (std::find(pre.begin(), pre.end(), i) == pre.end() &&
              (conflict(nodes[p], nodes[i], nullptr)))
            movable = false;
      if (!movable) continue;
      for (std::size_t p : pre) {
        nodes[q].reads.insert(nodes[q].reads.end(), nodes[p].reads.begin(), nodes[p].reads.end());
        nodes[q].writes.insert(nodes[q].writes.end(), nodes[p].writes.begin(), nodes[p].writes.end());
      }
      for (auto it = pre.rbegin(); it != pre.rend(); ++it) nodes.erase(nodes.begin() + static_cast<Idx>(*it));
    }
  }

  const int n = static_cast<int>(nodes.size());
  std::map<int, int> qr_node, lq_node;
  std::map<int, std::vector<int>> macro_left, macro_right;
  for (int i = 0; i < n; ++i) {
    const auto& x = nodes[i];
    if (x.kind == TaskKind::QRPanel) qr_node[x.iter] = i;
    if (x.kind == TaskKind::LQPanel) lq_node[x.iter] = i;
  }
  for (int i = 0; i < n; ++i) {
    const auto& x = nodes[i];
    if (x.kind == TaskKind::LeftUpdate && qr_range.count(x.iter + 1) &&
        !any_intersect(x.writes, qr_range[x.iter + 1]))
      macro_left[x.iter].push_back(i);
    if (x.kind == TaskKind::RightUpdate && lq_range.count(x.iter + 1) &&
        !any_intersect(x.writes, lq_range[x.iter + 1]))
      macro_right[x.iter].push_back(i);
  }

  auto full = [&](int t) { return qr_width.count(t) && lq_width.count(t) && qr_width[t] == b && lq_width[t] == b; };
  std::vector<int> steady;
  for (int t = 1; t + 2 < steps; ++t)
    if (full(t - 1) && full(t) && full(t + 1) && full(t + 2) && !macro_left[t].empty() && !macro_right[t].empty())
      steady.push_back(t);
  if (steady.empty()) throw std::invalid_argument("analyze_overlap: no steady-state step in the task window");

  struct Conflict {
    int a, c;
  };
  std::vector<Conflict> conflicts;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (conflict(nodes[i], nodes[j], nullptr)) conflicts.push_back({i, j});

  OverlapReport rep;
  rep.steady_steps = static_cast<int>(steady.size());
  for (int d = 0; d <= opt.max_lag; ++d) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(conflicts.size());
    for (const auto& [a, c] : conflicts) {
      const TaskNode& x = nodes[a];
      const TaskNode& y = nodes[c];
      const bool lr = x.kind == TaskKind::LeftUpdate && y.kind == TaskKind::RightUpdate;
      const bool rl = x.kind == TaskKind::RightUpdate && y.kind == TaskKind::LeftUpdate;
      if (lr || rl) {
        const int s = lr ? x.iter : y.iter;
        const int t = lr ? y.iter : x.iter;
        const bool left_first = s <= t + d;
        if (left_first == lr)
          edges.emplace_back(a, c);
        else
          edges.emplace_back(c, a);
      } else {
        edges.emplace_back(a, c);
      }
    }
    Reach r(n, edges);
    if (!r.acyclic()) continue;
    bool left_ok = true, right_ok = true;
    for (int t : steady) {
      for (int u : macro_left[t])
        if (r.ordered(u, qr_node[t + 1])) left_ok = false;
      for (int v : macro_right[t])
        if (r.ordered(v, lq_node[t + 1])) right_ok = false;
    }
    if (left_ok && rep.left_lag < 0) rep.left_lag = d;
    if (right_ok && rep.right_lag < 0) rep.right_lag = d;
    if (left_ok && right_ok && rep.both_lag < 0) rep.both_lag = d;
  }
  rep.left_feasible = rep.left_lag >= 0;
  rep.right_feasible = rep.right_lag >= 0;
  rep.both_feasible = rep.both_lag >= 0;
  (void)form;
  return rep;
}

std::string to_dot(const TaskDag& dag) {
  std::ostringstream os;
  os << "digraph tsr {\n";
  for (std::size_t i = 0; i < dag.nodes.size(); ++i)
    os << "  n" << i << " [label=\"" << dag.nodes[i].label() << "\"];\n";
  for (const auto& e : dag.edges)
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << dep_cause_name(e.cause) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace tsr
