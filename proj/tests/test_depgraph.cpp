#include <gtest/gtest.h>

#include <map>

#include "test_util.hpp"
#include "tsr/depgraph.hpp"
#include "tsr/svd.hpp"

using namespace tsr;

namespace {

int count_kind(const std::vector<TaskNode>& tasks, TaskKind k) {
  int c = 0;
  for (const auto& t : tasks) c += t.kind == k;
  return c;
}

int find_node(const TaskDag& dag, const std::string& label) {
  for (std::size_t i = 0; i < dag.nodes.size(); ++i)
    if (dag.nodes[i].label() == label) return static_cast<int>(i);
  return -1;
}

OverlapReport overlap(SvdForm form, std::ptrdiff_t n, std::ptrdiff_t ratio, std::ptrdiff_t b, bool fold = false) {
  const auto w = ratio * b;
  const TaskDag dag = build_dag(enumerate_tasks(n, n, w, b, form, 6));
  OverlapOptions opt;
  opt.fold_prerequisites = fold;
  return analyze_overlap(dag, w, b, form, opt);
}

}  // namespace

TEST(EnumerateTasks, SingleStepCountsAndBounds) {
  const auto tasks = enumerate_tasks(20, 16, 4, 2, SvdForm::Band, 1);
  EXPECT_EQ(count_kind(tasks, TaskKind::QRPanel), 1);
  EXPECT_EQ(count_kind(tasks, TaskKind::LQPanel), 1);
  // left target columns [2,16) in blocks of 2, right target rows [2,20) in blocks of 2
  EXPECT_EQ(count_kind(tasks, TaskKind::LeftUpdate), 7);
  EXPECT_EQ(count_kind(tasks, TaskKind::RightUpdate), 9);
  for (const auto& t : tasks)
    for (const auto& r : t.writes) {
      EXPECT_FALSE(r.empty());
      EXPECT_GE(r.row_begin, 0);
      EXPECT_LE(r.row_end, 20);
      EXPECT_GE(r.col_begin, 0);
      EXPECT_LE(r.col_end, 16);
    }
  EXPECT_EQ(tasks.front().writes.front(), (CellRange{4, 20, 0, 2}));
}

TEST(EnumerateTasks, StopsWhenReductionEnds) {
  const auto tasks = enumerate_tasks(8, 8, 4, 2, SvdForm::Band, 50);
  EXPECT_LT(count_kind(tasks, TaskKind::QRPanel), 50);
}

TEST(BuildDag, PanelPrecedesItsUpdates) {
  const TaskDag dag = build_dag(enumerate_tasks(24, 24, 4, 2, SvdForm::Band, 2));
  const int qr = find_node(dag, "QR0");
  const int l = find_node(dag, "L0.1");
  ASSERT_GE(qr, 0);
  ASSERT_GE(l, 0);
  EXPECT_TRUE(dag.has_edge(qr, l));
  EXPECT_TRUE(dag.acyclic());
}

TEST(BuildDag, DisjointTasksHaveNoEdge) {
  TaskNode a, b;
  a.kind = TaskKind::LeftUpdate;
  a.writes = {{0, 2, 0, 2}};
  a.reads = a.writes;
  b.kind = TaskKind::LeftUpdate;
  b.block = 1;
  b.writes = {{0, 2, 2, 4}};
  b.reads = b.writes;
  const TaskDag dag = build_dag({a, b});
  EXPECT_TRUE(dag.edges.empty());
}

TEST(BuildDag, EdgeCauses) {
  TaskNode w1, r2, w3;
  w1.writes = {{0, 2, 0, 2}};
  r2.reads = {{1, 2, 1, 2}};
  r2.writes = {{5, 6, 5, 6}};
  w3.writes = {{1, 3, 1, 3}};
  const TaskDag dag = build_dag({w1, r2, w3});
  std::map<std::pair<int, int>, DepCause> causes;
  for (const auto& e : dag.edges) causes[{e.from, e.to}] = e.cause;
  EXPECT_EQ(causes.at({0, 1}), DepCause::RAW);
  EXPECT_EQ(causes.at({1, 2}), DepCause::WAR);
  EXPECT_EQ(causes.at({0, 2}), DepCause::WAW);
}

TEST(BuildDag, EdgesRespectProgramOrder) {
  const TaskDag dag = build_dag(enumerate_tasks(30, 30, 6, 3, SvdForm::TriangularBand, 4));
  for (const auto& e : dag.edges) EXPECT_LT(e.from, e.to);
  EXPECT_TRUE(dag.acyclic());
}

TEST(BuildDag, EqualWidthChainIsSequential) {
  // w = b: each panel needs the previous step's trailing update.
  const TaskDag dag = build_dag(enumerate_tasks(20, 20, 2, 2, SvdForm::TriangularBand, 3));
  const int qr0 = find_node(dag, "QR0"), qr1 = find_node(dag, "QR1"), qr2 = find_node(dag, "QR2");
  ASSERT_GE(qr2, 0);
  EXPECT_TRUE(dag.reaches(qr0, qr1));
  EXPECT_TRUE(dag.reaches(qr1, qr2));
  EXPECT_FALSE(dag.reaches(qr1, qr0));
}

TEST(Overlap, TriangularBandNeedsWideBand) {
  const auto r1 = overlap(SvdForm::TriangularBand, 24, 1, 2);
  EXPECT_FALSE(r1.left_feasible);
  EXPECT_FALSE(r1.right_feasible);
  EXPECT_FALSE(r1.both_feasible);

  const auto r2 = overlap(SvdForm::TriangularBand, 24, 2, 2);
  EXPECT_TRUE(r2.left_feasible);
  EXPECT_TRUE(r2.right_feasible);
  EXPECT_FALSE(r2.both_feasible);

  for (std::ptrdiff_t ratio : {3, 4}) {
    const auto r = overlap(SvdForm::TriangularBand, 48, ratio, 2);
    EXPECT_TRUE(r.both_feasible) << "ratio " << ratio;
    EXPECT_EQ(r.both_lag, 1);
  }
}

TEST(Overlap, BandFormFeasibleAtTwiceBlock) {
  for (std::ptrdiff_t b : {2, 3}) {
    const auto r = overlap(SvdForm::Band, 24, 2, b);
    EXPECT_TRUE(r.left_feasible);
    EXPECT_TRUE(r.right_feasible);
    EXPECT_TRUE(r.both_feasible);
    EXPECT_EQ(r.both_lag, 0);
  }
  EXPECT_TRUE(overlap(SvdForm::Band, 48, 2, 4).both_feasible);
}

TEST(Overlap, FoldingDoesNotChangeVerdicts) {
  for (auto form : {SvdForm::TriangularBand, SvdForm::Band})
    for (std::ptrdiff_t ratio : {1, 2, 3}) {
      const auto a = overlap(form, 36, ratio, 3, false);
      const auto b = overlap(form, 36, ratio, 3, true);
      EXPECT_EQ(a.left_feasible, b.left_feasible);
      EXPECT_EQ(a.right_feasible, b.right_feasible);
      EXPECT_EQ(a.both_feasible, b.both_feasible);
    }
}

TEST(Overlap, TooFewStepsThrows) {
  const TaskDag dag = build_dag(enumerate_tasks(12, 12, 4, 2, SvdForm::Band, 6));
  EXPECT_THROW(analyze_overlap(dag, 4, 2, SvdForm::Band), std::invalid_argument);
}

TEST(Dot, ContainsNodesAndEdges) {
  const TaskDag dag = build_dag(enumerate_tasks(12, 12, 2, 2, SvdForm::Band, 1));
  const std::string dot = to_dot(dag);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("QR0"), std::string::npos);
  EXPECT_NE(dot.find("RAW"), std::string::npos);
  EXPECT_EQ(dot.back(), '\n');
}

TEST(RangeModel, MatchesWhatTheReductionTouches) {
  for (auto form : {SvdForm::Band, SvdForm::TriangularBand}) {
    const Matrix a = testutil::random_matrix(20, 20, 1);
    RangeLog log;
    if (form == SvdForm::Band) {
      SvdConfig c;
      c.w = 4;
      c.b = 2;
      c.log = &log;
      reduce_band_svd<double>(a, c);
    } else {
      reduce_tri_band<double>(a, 4, 2, &log);
    }
    std::map<std::pair<TaskKind, int>, CellSet> logged, modeled;
    for (const auto& r : log.records)
      for (const auto& c : r.writes) add_cells(logged[{r.kind, r.iter}], c);
    for (const auto& t : enumerate_tasks(20, 20, 4, 2, form, 100))
      for (const auto& c : t.writes) add_cells(modeled[{t.kind, t.iter}], c);
    EXPECT_EQ(logged, modeled);
  }
}
