#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "tsr/dense.hpp"
#include "tsr/runtime.hpp"

using namespace tsr;

namespace {

// TS fills the left half, TP the right half of c with products of a and b.
PhasePlan halves_plan(const Matrix& a, const Matrix& b, Matrix& c) {
  const Index h = c.cols() / 2;
  PhasePlan plan;
  plan.label = "halves";
  plan.seq_tasks.push_back(Task{"left", {Region{&c, 0, c.rows(), 0, h}}, {}, [&, h](const Workers& wk) {
                                  matmul<double>(1.0, Op::NoTrans, a, Op::NoTrans, b.leftCols(h), 0.0,
                                                 c.leftCols(h), wk);
                                }});
  plan.par_tasks.push_back(Task{"right", {Region{&c, 0, c.rows(), h, c.cols()}}, {}, [&, h](const Workers& wk) {
                                  matmul<double>(1.0, Op::NoTrans, a, Op::NoTrans, b.rightCols(b.cols() - h),
                                                 0.0, c.rightCols(c.cols() - h), wk);
                                }});
  return plan;
}

}  // namespace

TEST(ExecGroups, Validation) {
  EXPECT_NO_THROW((ExecGroups{1, 0}.validate()));
  EXPECT_NO_THROW((ExecGroups{2, 1}.validate()));
  EXPECT_THROW((ExecGroups{1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ExecGroups{0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((ExecGroups{2, 3}.validate()), std::invalid_argument);
}

TEST(RunPhase, EmptyParListIsSequential) {
  Runtime rt({2, 1});
  std::vector<int> order;
  PhasePlan plan;
  for (int i = 0; i < 3; ++i)
    plan.seq_tasks.push_back(Task{"t" + std::to_string(i), {whole(&order)}, {}, [&order, i](const Workers&) {
                                    order.push_back(i);
                                  }});
  const EventTrace tr = rt.run_phase(plan);
  EXPECT_EQ(order, (std::vector<int>{0, 1, 2}));
  ASSERT_EQ(tr.events.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) EXPECT_GT(tr.events[i].start, tr.events[i - 1].end);
}

TEST(RunPhase, ResultsIndependentOfGrouping) {
  const Matrix a = testutil::random_matrix(60, 40, 1);
  const Matrix b = testutil::random_matrix(40, 30, 2);
  Matrix ref(60, 30);
  matmul<double>(1.0, Op::NoTrans, a, Op::NoTrans, b, 0.0, ref);
  for (ExecGroups g : {ExecGroups{1, 0}, ExecGroups{2, 1}, ExecGroups{4, 2}, ExecGroups{3, 0}}) {
    Runtime rt(g);
    Matrix c = Matrix::Zero(60, 30);
    rt.run_phase(halves_plan(a, b, c));
    EXPECT_EQ(std::memcmp(c.data(), ref.data(), sizeof(double) * ref.size()), 0);
  }
}

TEST(RunPhase, RejectsOverlappingWrites) {
  Runtime rt({2, 1});
  Matrix c = Matrix::Zero(4, 4);
  bool ran = false;
  PhasePlan plan;
  plan.seq_tasks.push_back(Task{"a", {Region{&c, 0, 4, 0, 3}}, {}, [&](const Workers&) { ran = true; }});
  plan.par_tasks.push_back(Task{"b", {Region{&c, 0, 4, 2, 4}}, {}, [&](const Workers&) { ran = true; }});
  EXPECT_THROW(rt.run_phase(plan), PhaseConflictError);
  EXPECT_FALSE(ran);
}

TEST(RunPhase, RejectsWriteReadOverlapAcrossLists) {
  Runtime rt({2, 1});
  Matrix c = Matrix::Zero(4, 4);
  PhasePlan plan;
  plan.seq_tasks.push_back(Task{"a", {Region{&c, 0, 2, 0, 4}}, {}, [](const Workers&) {}});
  plan.par_tasks.push_back(Task{"b", {Region{&c, 2, 4, 0, 4}}, {Region{&c, 1, 3, 0, 1}}, [](const Workers&) {}});
  EXPECT_THROW(rt.run_phase(plan), PhaseConflictError);
}

TEST(RunPhase, RejectsUndeclaredWrites) {
  Runtime rt({2, 1});
  PhasePlan plan;
  plan.seq_tasks.push_back(Task{"a", {}, {}, [](const Workers&) {}});
  EXPECT_THROW(rt.run_phase(plan), PhaseConflictError);
}

TEST(RunPhase, DistinctOwnersNeverConflict) {
  Matrix x(2, 2), y(2, 2);
  PhasePlan plan;
  plan.seq_tasks.push_back(Task{"a", {Region{&x, 0, 2, 0, 2}}, {}, [](const Workers&) {}});
  plan.par_tasks.push_back(Task{"b", {Region{&y, 0, 2, 0, 2}}, {}, [](const Workers&) {}});
  EXPECT_NO_THROW(validate_phase(plan));
}

TEST(RunPhase, ListOrderWithinGroups) {
  Runtime rt({3, 1});
  std::vector<int> sink_s, sink_p;
  PhasePlan plan;
  for (int i = 0; i < 4; ++i) {
    plan.seq_tasks.push_back(Task{"s" + std::to_string(i), {whole(&sink_s)}, {}, [](const Workers&) {}});
    plan.par_tasks.push_back(Task{"p" + std::to_string(i), {whole(&sink_p)}, {}, [](const Workers&) {}});
  }
  const EventTrace tr = rt.run_phase(plan);
  for (int i = 1; i < 4; ++i) {
    EXPECT_GT(tr.find("s" + std::to_string(i))->start, tr.find("s" + std::to_string(i - 1))->end);
    EXPECT_GT(tr.find("p" + std::to_string(i))->start, tr.find("p" + std::to_string(i - 1))->end);
  }
  EXPECT_EQ(tr.find("s0")->group, Group::TS);
  EXPECT_EQ(tr.find("p0")->group, Group::TP);
}

TEST(Barrier, PhasesDoNotOverlap) {
  std::mt19937 rng(3);
  Runtime rt({3, 1});
  int x = 0, y = 0;
  for (int rep = 0; rep < 20; ++rep) {
    rt.clear_trace();
    const int ns = 1 + static_cast<int>(rng() % 3), np = 1 + static_cast<int>(rng() % 3);
    for (int phase = 0; phase < 2; ++phase) {
      PhasePlan plan;
      for (int i = 0; i < ns; ++i)
        plan.seq_tasks.push_back(Task{"p" + std::to_string(phase) + "s" + std::to_string(i), {whole(&x)}, {},
                                      [&x](const Workers&) { ++x; }});
      for (int i = 0; i < np; ++i)
        plan.par_tasks.push_back(Task{"p" + std::to_string(phase) + "t" + std::to_string(i), {whole(&y)}, {},
                                      [&y](const Workers&) { ++y; }});
      rt.run_phase(plan);
    }
    std::uint64_t last_end0 = 0, first_start1 = ~0ull;
    for (const auto& e : rt.trace().events) {
      if (e.task_id[1] == '0') last_end0 = std::max(last_end0, e.end);
      if (e.task_id[1] == '1') first_start1 = std::min(first_start1, e.start);
    }
    EXPECT_LT(last_end0, first_start1);
  }
}

TEST(RunPhase, NoLookAheadRunsListsBackToBack) {
  Runtime rt({2, 0});
  std::vector<std::string> order;
  std::vector<int> other;
  PhasePlan plan;
  plan.seq_tasks.push_back(Task{"s", {whole(&order)}, {}, [&](const Workers&) { order.push_back("s"); }});
  plan.par_tasks.push_back(Task{"p", {whole(&other)}, {}, [&](const Workers&) { order.push_back("p"); }});
  rt.run_phase(plan);
  EXPECT_EQ(order, (std::vector<std::string>{"s", "p"}));
}

TEST(Flops, SnapshotAndReset) {
  Runtime rt({2, 1});
  Matrix c(4, 4);
  const Matrix a = Matrix::Ones(4, 4);
  rt.run_all("mm", {Task{"mm", {Region{&c, 0, 4, 0, 4}}, {}, [&](const Workers& wk) {
                           matmul<double>(1.0, Op::NoTrans, a, Op::NoTrans, a, 0.0, c, wk);
                         }}});
  EXPECT_EQ(rt.snapshot_flops().total(), 128u);
  rt.reset_flops();
  EXPECT_EQ(rt.snapshot_flops().total(), 0u);
}

TEST(Trace, DumpFormat) {
  EventTrace tr;
  tr.events.push_back({"QR:0", Group::TS, 3, 4});
  std::ostringstream os;
  tr.dump(os);
  EXPECT_EQ(os.str(), "QR:0\tTS\t3\t4\n");
}

TEST(WriteAudit, CatchesUndeclaredCell) {
  Runtime rt({2, 1});
  Matrix c = Matrix::Zero(4, 4);
  rt.audit_matrix(&c, c);
  std::vector<Task> ok{Task{"ok", {Region{&c, 0, 2, 0, 2}}, {}, [&](const Workers&) { c(1, 1) = 1; }}};
  EXPECT_NO_THROW(rt.run_all("ok", ok));
  std::vector<Task> bad{Task{"bad", {Region{&c, 0, 2, 0, 2}}, {}, [&](const Workers&) { c(3, 3) = 1; }}};
  EXPECT_THROW(rt.run_all("bad", bad), WriteAuditError);
}

TEST(ThreadTeam, PropagatesExceptions) {
  ThreadTeam team(3);
  EXPECT_THROW(team.parallel_for(10, [](std::ptrdiff_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }),
               std::runtime_error);
  std::atomic<int> sum{0};
  team.parallel_for(100, [&](std::ptrdiff_t i) { sum += static_cast<int>(i); });
  EXPECT_EQ(sum.load(), 4950);
}
