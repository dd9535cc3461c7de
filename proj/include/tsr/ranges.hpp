#pragma once

// Element ranges touched by the SVD reduction tasks.  Shared by the
// reductions (which log what they actually touch) and the dependency model
// (which derives the same ranges symbolically).

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

namespace tsr {

enum class SvdForm { TriangularBand, Band };

enum class TaskKind { QRPanel, LQPanel, LeftUpdate, RightUpdate };

const char* task_kind_name(TaskKind k);

/// Half-open [row_begin, row_end) x [col_begin, col_end).
struct CellRange {
  std::ptrdiff_t row_begin = 0, row_end = 0, col_begin = 0, col_end = 0;

  bool empty() const { return row_begin >= row_end || col_begin >= col_end; }
  bool intersects(const CellRange& o) const {
    return !empty() && !o.empty() && row_begin < o.row_end && o.row_begin < row_end &&
           col_begin < o.col_end && o.col_begin < col_end;
  }
  bool operator==(const CellRange&) const = default;
};

using CellSet = std::set<std::pair<std::ptrdiff_t, std::ptrdiff_t>>;

inline void add_cells(CellSet& s, const CellRange& r) {
  for (auto i = r.row_begin; i < r.row_end; ++i)
    for (auto j = r.col_begin; j < r.col_end; ++j) s.emplace(i, j);
}

struct RangeRecord {
  TaskKind kind = TaskKind::QRPanel;
  int iter = 0;
  std::vector<CellRange> reads;
  std::vector<CellRange> writes;
};

/// What a reduction actually touched, in execution order.
struct RangeLog {
  std::vector<RangeRecord> records;

  void add(TaskKind kind, int iter, std::vector<CellRange> reads, std::vector<CellRange> writes) {
    records.push_back({kind, iter, std::move(reads), std::move(writes)});
  }
};

}  // namespace tsr
