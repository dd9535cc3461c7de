#pragma once

// Two-sided reductions of a general m x n matrix (m >= n) for the SVD:
// upper triangular-band form and band form with equal lower and upper
// bandwidth w.
//
// Band form, step at column k (0-based), widths bl (left) and br (right):
//   B0 = A[k+w:m, k:k+bl]        = U R      left panel
//   B1 = A[k+w:m, k+bl:k+w]      B1 := U^T B1
//   C0 = A[k:k+br, k+w:n]        = L V^T    right panel
//   C1 = A[k+br:k+w, k+w:n]      C1 := C1 V
//   D  = A[k+w:m, k+w:n]         D := U^T D V
// Triangular-band form, step at column k:
//   panel A[k:m, k:k+bl], left update of A[k:m, k+bl:n],
//   panel A[k:k+br, k+w:n], right update of A[k+br:m, k+w:n].
// The right panel of the triangular-band form needs its rows left-updated
// first, which is what rules out look-ahead there for small w/b.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsr/dense.hpp"
#include "tsr/ranges.hpp"
#include "tsr/runtime.hpp"
#include "tsr/sevp.hpp"

namespace tsr {

enum class SvdVariant { Reference, Simultaneous, V1, V2 };
enum class SvdV2Mapping { B1C1OnTS, B1C1OnAll };

struct SvdConfig {
  Index w = 8;
  Index b = 4;
  SvdForm form = SvdForm::Band;
  SvdVariant variant = SvdVariant::Reference;
  SvdV2Mapping v2_mapping = SvdV2Mapping::B1C1OnTS;
  Index inner_b = 16;
  RangeLog* log = nullptr;  ///< receives the touched ranges (Reference variant only)

  void validate() const {
    if (w < 1) throw ConfigError("bandwidth w must be >= 1");
    if (b < 1 || b > w) throw ConfigError("block size b must satisfy 1 <= b <= w");
    if (inner_b < 1) throw ConfigError("inner block size must be >= 1");
    if (form == SvdForm::TriangularBand && variant != SvdVariant::Reference)
      throw ConfigError("the triangular-band form only has the Reference variant");
    if (form == SvdForm::Band && variant == SvdVariant::V1 && 2 * b > w)
      throw ConfigError("variant V1 requires 2b <= w");
  }
};

template <class Scalar>
struct SvdResult {
  Mat<Scalar> band;
  FlopSnapshot flops;
  SvdForm form = SvdForm::Band;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Block widths of one step; zero widths mean the side is inactive.
struct SvdStep {
  Index k = 0;
  Index bl = 0;
  Index br = 0;
  bool left() const { return bl > 0; }
  bool right() const { return br > 0; }
};

inline SvdStep band_step(Index m, Index n, Index w, Index b, Index k) {
  SvdStep s;
  s.k = k;
  if (k < n && m - k - w >= 2) s.bl = std::min({b, n - k, m - k - w - 1});
  if (s.bl > 0 && n - k - w >= 2) s.br = std::min(s.bl, n - k - w - 1);
  return s;
}

inline SvdStep triband_step(Index m, Index n, Index w, Index b, Index k) {
  SvdStep s;
  s.k = k;
  if (k < n && m - k >= 2) s.bl = std::min({b, n - k, m - k - 1});
  if (s.bl > 0 && n - k - w >= 2) s.br = std::min(s.bl, n - k - w - 1);
  return s;
}

template <class Scalar>
struct SvdState {
  Mat<Scalar> a;
  Index w = 1;
  Index b = 1;
  Index inner_b = 16;
  SvdForm form = SvdForm::Band;
  Index k = 0;
  int iterations = 0;
  RangeLog* log = nullptr;
  std::optional<PanelFactors<Scalar>> left;   ///< U of the current step once factored
  std::optional<PanelFactors<Scalar>> right;  ///< V of the current step once factored

  Index m() const { return a.rows(); }
  Index n() const { return a.cols(); }
  SvdStep step() const { return step_at(k); }
  SvdStep step_at(Index kk) const {
    return form == SvdForm::Band ? band_step(m(), n(), w, b, kk) : triband_step(m(), n(), w, b, kk);
  }
  bool done() const { return !step().left(); }
};

/// Intermediate products of the fused update D := U^T D V, kept as the two
/// factors of D + [X, Y_U] [Y_V, Z_L]^T with Z_L = D^T W_U, Z_R = D W_V and
/// X = Z_R + Y_U (Z_L^T W_V).  Without a right transform it reduces to
/// D + Y_U Z_L^T.
template <class Scalar>
struct FusedUpdate {
  Mat<Scalar> lhs;  ///< [X, Y_U]
  Mat<Scalar> rhs;  ///< [Y_V, Z_L]
};

template <class Scalar>
FusedUpdate<Scalar> fused_update_prepare(NoDeduce<ConstMatRef<Scalar>> d, const PanelFactors<Scalar>& u,
                                         const PanelFactors<Scalar>* v, const Workers& wk = {}) {
  detail::require(d.rows() == u.order() && (!v || d.cols() == v->order()),
                  "fused_update: dimension differs from reflector order");
  const Index mr = d.rows(), nc = d.cols(), bl = u.width(), br = v ? v->width() : 0;
  FusedUpdate<Scalar> f;
  f.lhs.resize(mr, br + bl);
  f.rhs.resize(nc, br + bl);
  auto zl = f.rhs.rightCols(bl);
  matmul<Scalar>(Scalar(1), Op::Trans, d, Op::NoTrans, u.w, Scalar(0), zl, wk);
  f.lhs.rightCols(bl) = u.y;
  if (v) {
    auto x = f.lhs.leftCols(br);
    matmul<Scalar>(Scalar(1), Op::NoTrans, d, Op::NoTrans, v->w, Scalar(0), x, wk);
    Mat<Scalar> small(bl, br);
    matmul<Scalar>(Scalar(1), Op::Trans, f.rhs.rightCols(bl), Op::NoTrans, v->w, Scalar(0), small, wk);
    matmul<Scalar>(Scalar(1), Op::NoTrans, u.y, Op::NoTrans, small, Scalar(1), x, wk);
    f.rhs.leftCols(br) = v->y;
  }
  return f;
}

/// Applies the fused update to the block D[r0:r1, c0:c1] (offsets relative to D).
template <class Scalar>
void fused_update_apply(NoDeduce<MatRef<Scalar>> d_block, const FusedUpdate<Scalar>& f, Index r0, Index c0,
                        const Workers& wk = {}) {
  if (d_block.rows() == 0 || d_block.cols() == 0) return;
  matmul<Scalar>(Scalar(1), Op::NoTrans, f.lhs.middleRows(r0, d_block.rows()), Op::Trans,
                 f.rhs.middleRows(c0, d_block.cols()), Scalar(1), d_block, wk);
}

namespace detail {

template <class Scalar>
PanelFactors<Scalar> factor_qr_block(Mat<Scalar>& a, const CellRange& r, Index inner_b, const Workers& wk) {
  auto p = a.block(r.row_begin, r.col_begin, r.row_end - r.row_begin, r.col_end - r.col_begin);
  PanelFactors<Scalar> f = qr_panel<Scalar>(p, inner_b, wk);
  for (Index c = 0; c < p.cols(); ++c) p.col(c).tail(p.rows() - c - 1).setZero();
  return f;
}

template <class Scalar>
PanelFactors<Scalar> factor_lq_block(Mat<Scalar>& a, const CellRange& r, Index inner_b, const Workers& wk) {
  auto p = a.block(r.row_begin, r.col_begin, r.row_end - r.row_begin, r.col_end - r.col_begin);
  PanelFactors<Scalar> f = lq_panel<Scalar>(p, inner_b, wk);
  for (Index i = 0; i < p.rows(); ++i) p.row(i).tail(p.cols() - i - 1).setZero();
  return f;
}

template <class Scalar>
auto view(Mat<Scalar>& a, const CellRange& r) {
  return a.block(r.row_begin, r.col_begin, r.row_end - r.row_begin, r.col_end - r.col_begin);
}

template <class Scalar>
Region region(const Mat<Scalar>& a, const CellRange& r) {
  return Region{&a, r.row_begin, r.row_end, r.col_begin, r.col_end};
}

// Block coordinates of one step.
struct SvdBlocks {
  CellRange qr, lq, left_target, right_target;
};

inline SvdBlocks svd_blocks(SvdForm form, Index m, Index n, Index w, const SvdStep& s) {
  const Index k = s.k;
  SvdBlocks g;
  if (form == SvdForm::Band) {
    g.qr = {k + w, m, k, k + s.bl};
    g.left_target = {k + w, m, k + s.bl, n};
  } else {
    g.qr = {k, m, k, k + s.bl};
    g.left_target = {k, m, k + s.bl, n};
  }
  if (s.right()) {
    g.lq = {k, k + s.br, k + w, n};
    g.right_target = {k + s.br, m, k + w, n};
  }
  return g;
}

template <class Scalar>
Task qr_task(SvdState<Scalar>& s, const CellRange& r, std::optional<PanelFactors<Scalar>>& out,
             const std::string& id) {
  return Task{id, {region(s.a, r), whole(&out)}, {}, [&s, &out, r](const Workers& wk) {
                out = factor_qr_block(s.a, r, s.inner_b, wk);
              }};
}

template <class Scalar>
Task lq_task(SvdState<Scalar>& s, const CellRange& r, std::optional<PanelFactors<Scalar>>& out,
             const std::string& id) {
  return Task{id, {region(s.a, r), whole(&out)}, {}, [&s, &out, r](const Workers& wk) {
                out = factor_lq_block(s.a, r, s.inner_b, wk);
              }};
}

template <class Scalar>
Task apply_left_task(SvdState<Scalar>& s, const PanelFactors<Scalar>& f, const CellRange& r,
                     const std::string& id) {
  return Task{id, {region(s.a, r)}, {whole(&f)}, [&s, &f, r](const Workers& wk) {
                apply_wy_left<Scalar>(view(s.a, r), f, wk);
              }};
}

template <class Scalar>
Task apply_right_task(SvdState<Scalar>& s, const PanelFactors<Scalar>& f, const CellRange& r,
                      const std::string& id) {
  return Task{id, {region(s.a, r)}, {whole(&f)}, [&s, &f, r](const Workers& wk) {
                apply_wy_right<Scalar>(view(s.a, r), f, wk);
              }};
}

inline void push_nonempty(std::vector<Task>& list, const CellRange& r, Task t) {
  if (!r.empty()) list.push_back(std::move(t));
}

}  // namespace detail

template <class Scalar>
SvdState<Scalar> svd_begin(const Mat<Scalar>& a, const SvdConfig& cfg) {
  cfg.validate();
  if (a.rows() < a.cols()) throw DimensionError("SVD reduction expects m >= n");
  SvdState<Scalar> s;
  s.a = a;
  s.w = cfg.w;
  s.b = cfg.b;
  s.inner_b = cfg.inner_b;
  s.form = cfg.form;
  s.log = cfg.log;
  return s;
}

/// Sequential step: QR, left update, LQ, right update.  Logs the touched
/// ranges when a log is attached.
template <class Scalar>
void svd_reference_step(SvdState<Scalar>& s, Runtime& rt) {
  const SvdStep st = s.step();
  if (!st.left()) return;
  const int t = s.iterations;
  const auto g = detail::svd_blocks(s.form, s.m(), s.n(), s.w, st);
  std::optional<PanelFactors<Scalar>> u, v;
  std::vector<Task> tasks;
  tasks.push_back(detail::qr_task(s, g.qr, u, detail::tag("QR", t)));
  detail::push_nonempty(tasks, g.left_target, detail::apply_left_task(s, *u, g.left_target, detail::tag("L", t)));
  rt.run_all("left", std::move(tasks));
  if (s.log) {
    s.log->add(TaskKind::QRPanel, t, {g.qr}, {g.qr});
    if (!g.left_target.empty()) s.log->add(TaskKind::LeftUpdate, t, {g.qr, g.left_target}, {g.left_target});
  }
  if (st.right()) {
    tasks.clear();
    tasks.push_back(detail::lq_task(s, g.lq, v, detail::tag("LQ", t)));
    detail::push_nonempty(tasks, g.right_target,
                          detail::apply_right_task(s, *v, g.right_target, detail::tag("R", t)));
    rt.run_all("right", std::move(tasks));
    if (s.log) {
      s.log->add(TaskKind::LQPanel, t, {g.lq}, {g.lq});
      if (!g.right_target.empty())
        s.log->add(TaskKind::RightUpdate, t, {g.lq, g.right_target}, {g.right_target});
    }
  }
  s.k += st.bl;
  ++s.iterations;
}

namespace detail {

template <class Scalar>
Task fused_task(SvdState<Scalar>& s, const FusedUpdate<Scalar>& fu, const CellRange& r, Index d0r, Index d0c,
                const std::string& id) {
  return Task{id, {region(s.a, r)}, {whole(&fu)}, [&s, &fu, r, d0r, d0c](const Workers& wk) {
                fused_update_apply<Scalar>(view(s.a, r), fu, r.row_begin - d0r, r.col_begin - d0c, wk);
              }};
}

template <class Scalar>
Task fused_prepare_task(SvdState<Scalar>& s, const CellRange& d, FusedUpdate<Scalar>& out,
                        const PanelFactors<Scalar>& u, const PanelFactors<Scalar>* v, const std::string& id) {
  std::vector<Region> reads{region(s.a, d), whole(&u)};
  if (v) reads.push_back(whole(v));
  return Task{id, {whole(&out)}, std::move(reads), [&s, &out, &u, v, d](const Workers& wk) {
                out = fused_update_prepare<Scalar>(view(s.a, d), u, v, wk);
              }};
}

// Factors both panels of the current step if that has not happened yet.
template <class Scalar>
void svd_prologue(SvdState<Scalar>& s, Runtime& rt) {
  const SvdStep st = s.step();
  if (!st.left() || s.left) return;
  const auto g = svd_blocks(s.form, s.m(), s.n(), s.w, st);
  std::vector<Task> tasks;
  tasks.push_back(qr_task(s, g.qr, s.left, tag("QR", s.iterations)));
  if (st.right()) tasks.push_back(lq_task(s, g.lq, s.right, tag("LQ", s.iterations)));
  rt.run_all("prologue", std::move(tasks));
}

}  // namespace detail

/// Band form, both panels factored first, then B1 and C1 updates and the
/// fused update of D.
template <class Scalar>
void svd_simultaneous_step(SvdState<Scalar>& s, Runtime& rt) {
  const SvdStep st = s.step();
  if (!st.left()) return;
  detail::svd_prologue(s, rt);
  const Index m = s.m(), n = s.n(), k = st.k, w = s.w;
  const int t = s.iterations;
  const CellRange b1{k + w, m, k + st.bl, std::min(k + w, n)};
  const CellRange c1{k + st.br, k + w, k + w, n};
  const CellRange d{k + w, m, k + w, n};
  const PanelFactors<Scalar>& u = *s.left;
  const PanelFactors<Scalar>* v = st.right() ? &*s.right : nullptr;
  FusedUpdate<Scalar> fu;
  std::vector<Task> tasks;
  detail::push_nonempty(tasks, b1, detail::apply_left_task(s, u, b1, detail::tag("B1", t)));
  if (v) detail::push_nonempty(tasks, c1, detail::apply_right_task(s, *v, c1, detail::tag("C1", t)));
  if (!d.empty()) {
    tasks.push_back(detail::fused_prepare_task(s, d, fu, u, v, detail::tag("Z", t)));
    tasks.push_back(detail::fused_task(s, fu, d, d.row_begin, d.col_begin, detail::tag("D", t)));
  }
  rt.run_all("update", std::move(tasks));
  s.left.reset();
  s.right.reset();
  s.k += st.bl;
  ++s.iterations;
}

/// Band form look-ahead for 2b <= w on top of the sequential update order.
/// TS updates the leading columns of B1 and rows of C1 and factors the next
/// panels, which lie inside them; TP updates the rest of B1, C1 and D.
template <class Scalar>
void svd_v1_step(SvdState<Scalar>& s, Runtime& rt) {
  const SvdStep st = s.step();
  if (!st.left()) return;
  if (2 * s.b > s.w) throw ConfigError("variant V1 requires 2b <= w");
  detail::svd_prologue(s, rt);
  const Index m = s.m(), n = s.n(), k = st.k, w = s.w;
  const int t = s.iterations;
  const SvdStep nx = s.step_at(k + st.bl);
  const auto ng = detail::svd_blocks(s.form, m, n, w, nx);
  const Index b1_end = std::min(k + w, n);
  const Index b1_split = k + st.bl + nx.bl;
  const Index c1_split = nx.right() ? nx.k + nx.br : k + st.br;
  const PanelFactors<Scalar>& u = *s.left;
  std::optional<PanelFactors<Scalar>> nu, nv;

  PhasePlan plan;
  plan.label = detail::tag("v1", t);
  auto& seq = plan.seq_tasks;
  auto& par = plan.par_tasks;
  if (nx.left()) {
    const CellRange b1l{k + w, m, k + st.bl, b1_split};
    detail::push_nonempty(seq, b1l, detail::apply_left_task(s, u, b1l, detail::tag("B1L", t)));
    seq.push_back(detail::qr_task(s, ng.qr, nu, detail::tag("QR", t + 1)));
  }
  const CellRange b1r{k + w, m, b1_split, b1_end};
  detail::push_nonempty(par, b1r, detail::apply_left_task(s, u, b1r, detail::tag("B1R", t)));
  const CellRange d{k + w, m, k + w, n};
  detail::push_nonempty(par, d, detail::apply_left_task(s, u, d, detail::tag("DL", t)));
  if (st.right()) {
    const PanelFactors<Scalar>& v = *s.right;
    if (nx.right()) {
      const CellRange c1t{k + st.br, c1_split, k + w, n};
      detail::push_nonempty(seq, c1t, detail::apply_right_task(s, v, c1t, detail::tag("C1T", t)));
      seq.push_back(detail::lq_task(s, ng.lq, nv, detail::tag("LQ", t + 1)));
    }
    const CellRange c1b{c1_split, k + w, k + w, n};
    detail::push_nonempty(par, c1b, detail::apply_right_task(s, v, c1b, detail::tag("C1B", t)));
    detail::push_nonempty(par, d, detail::apply_right_task(s, v, d, detail::tag("DR", t)));
  }
  rt.run_phase(plan);

  s.left = std::move(nu);
  s.right = std::move(nv);
  s.k += st.bl;
  ++s.iterations;
}

/// Band form look-ahead for any b <= w on top of the fused update.  Phase 1
/// updates B1 and C1 and forms Z_L, Z_R, X; phase 2 splits D so that TS
/// finishes the leading rows/columns the next panels spill into (D11, D12,
/// D21) and factors them while TP updates D22.
template <class Scalar>
void svd_v2_step(SvdState<Scalar>& s, Runtime& rt, SvdV2Mapping mapping) {
  const SvdStep st = s.step();
  if (!st.left()) return;
  detail::svd_prologue(s, rt);
  const Index m = s.m(), n = s.n(), k = st.k, w = s.w;
  const int t = s.iterations;
  const SvdStep nx = s.step_at(k + st.bl);
  const auto ng = detail::svd_blocks(s.form, m, n, w, nx);
  const CellRange b1{k + w, m, k + st.bl, std::min(k + w, n)};
  const CellRange c1{k + st.br, k + w, k + w, n};
  const CellRange d{k + w, m, k + w, n};
  const PanelFactors<Scalar>& u = *s.left;
  const PanelFactors<Scalar>* v = st.right() ? &*s.right : nullptr;
  FusedUpdate<Scalar> fu;
  std::optional<PanelFactors<Scalar>> nu, nv;

  std::vector<Task> upd;
  detail::push_nonempty(upd, b1, detail::apply_left_task(s, u, b1, detail::tag("B1", t)));
  if (v) detail::push_nonempty(upd, c1, detail::apply_right_task(s, *v, c1, detail::tag("C1", t)));
  std::vector<Task> prep;
  if (!d.empty()) prep.push_back(detail::fused_prepare_task(s, d, fu, u, v, detail::tag("Z", t)));
  if (mapping == SvdV2Mapping::B1C1OnTS) {
    rt.run_phase(PhasePlan{detail::tag("v2-1", t), std::move(upd), std::move(prep)});
  } else {
    for (auto& task : prep) upd.push_back(std::move(task));
    rt.run_all(detail::tag("v2-1", t), std::move(upd));
  }

  const Index drows = std::max<Index>(m - k - w, 0), dcols = std::max<Index>(n - k - w, 0);
  const Index sc = nx.left() ? std::clamp(nx.k + nx.bl - (k + w), Index(0), dcols) : 0;
  const Index sr = nx.right() ? std::clamp(nx.k + nx.br - (k + w), Index(0), drows) : 0;
  const Index r_mid = k + w + sr, c_mid = k + w + sc;
  PhasePlan p2{detail::tag("v2-2", t), {}, {}};
  auto& seq = p2.seq_tasks;
  if (!d.empty()) {
    const CellRange d11{k + w, r_mid, k + w, c_mid};
    const CellRange d12{k + w, r_mid, c_mid, n};
    const CellRange d21{r_mid, m, k + w, c_mid};
    const CellRange d22{r_mid, m, c_mid, n};
    detail::push_nonempty(seq, d11, detail::fused_task(s, fu, d11, k + w, k + w, detail::tag("D11", t)));
    detail::push_nonempty(seq, d12, detail::fused_task(s, fu, d12, k + w, k + w, detail::tag("D12", t)));
    detail::push_nonempty(seq, d21, detail::fused_task(s, fu, d21, k + w, k + w, detail::tag("D21", t)));
    detail::push_nonempty(p2.par_tasks, d22, detail::fused_task(s, fu, d22, k + w, k + w, detail::tag("D22", t)));
  }
  if (nx.left()) seq.push_back(detail::qr_task(s, ng.qr, nu, detail::tag("QR", t + 1)));
  if (nx.right()) seq.push_back(detail::lq_task(s, ng.lq, nv, detail::tag("LQ", t + 1)));
  rt.run_phase(p2);

  s.left = std::move(nu);
  s.right = std::move(nv);
  s.k += st.bl;
  ++s.iterations;
}

namespace detail {

template <class Scalar>
void zero_outside(Mat<Scalar>& a, Index lower, Index upper) {
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r)
      if (r - c > lower || c - r > upper) a(r, c) = Scalar(0);
}

inline FlopSnapshot flop_delta(const FlopSnapshot& before, const FlopSnapshot& after) {
  FlopSnapshot d;
  for (int c = 0; c < kFlopClasses; ++c) d.by_class[c] = after.by_class[c] - before.by_class[c];
  return d;
}

template <class Scalar>
SvdResult<Scalar> run_svd(SvdState<Scalar>& s, const SvdConfig& cfg, Runtime& rt) {
  SvdResult<Scalar> res;
  res.form = cfg.form;
  if (cfg.form == SvdForm::Band && cfg.variant == SvdVariant::V2 && 2 * cfg.b <= cfg.w)
    res.warnings.push_back("variant V2 used with 2b <= w; V1 is the intended regime");
  const FlopSnapshot before = rt.snapshot_flops();
  while (!s.done()) {
    switch (cfg.variant) {
      case SvdVariant::Reference: svd_reference_step(s, rt); break;
      case SvdVariant::Simultaneous: svd_simultaneous_step(s, rt); break;
      case SvdVariant::V1: svd_v1_step(s, rt); break;
      case SvdVariant::V2: svd_v2_step(s, rt, cfg.v2_mapping); break;
    }
  }
  res.flops = flop_delta(before, rt.snapshot_flops());
  res.iterations = s.iterations;
  if (cfg.form == SvdForm::Band)
    zero_outside(s.a, s.w, s.w);
  else
    zero_outside(s.a, Index(0), s.w);
  res.band = std::move(s.a);
  return res;
}

}  // namespace detail

/// Upper triangular-band reduction with upper bandwidth w (m >= n).
template <class Scalar>
SvdResult<Scalar> reduce_tri_band(const Mat<Scalar>& a, Index w, Index b, Runtime& rt,
                                  RangeLog* log = nullptr) {
  SvdConfig cfg;
  cfg.w = w;
  cfg.b = b;
  cfg.form = SvdForm::TriangularBand;
  cfg.log = log;
  SvdState<Scalar> s = svd_begin(a, cfg);
  return detail::run_svd(s, cfg, rt);
}

template <class Scalar>
SvdResult<Scalar> reduce_tri_band(const Mat<Scalar>& a, Index w, Index b, RangeLog* log = nullptr) {
  Runtime rt(ExecGroups{1, 0});
  return reduce_tri_band(a, w, b, rt, log);
}

/// Band reduction with lower and upper bandwidth w.  Wide inputs are reduced
/// through their transpose.
template <class Scalar>
SvdResult<Scalar> reduce_band_svd(const Mat<Scalar>& a, const SvdConfig& cfg, Runtime& rt) {
  if (cfg.form != SvdForm::Band) {
    cfg.validate();
    SvdState<Scalar> s = svd_begin(a, cfg);
    return detail::run_svd(s, cfg, rt);
  }
  if (a.rows() < a.cols()) {
    SvdConfig tc = cfg;
    tc.log = nullptr;
    Mat<Scalar> at = a.transpose();
    SvdState<Scalar> s = svd_begin(at, tc);
    SvdResult<Scalar> r = detail::run_svd(s, tc, rt);
    r.band.transposeInPlace();
    return r;
  }
  SvdState<Scalar> s = svd_begin(a, cfg);
  return detail::run_svd(s, cfg, rt);
}

template <class Scalar>
SvdResult<Scalar> reduce_band_svd(const Mat<Scalar>& a, const SvdConfig& cfg, const ExecGroups& groups = {}) {
  Runtime rt(groups);
  return reduce_band_svd(a, cfg, rt);
}

/// round(4 (m n^2 - n^3 / 3)).
inline std::uint64_t svd_nominal_flops(std::uint64_t m, std::uint64_t n) {
  return 4 * m * n * n - (4 * n * n * n + 1) / 3;
}

}  // namespace tsr
