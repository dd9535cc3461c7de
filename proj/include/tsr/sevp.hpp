#pragma once

// Reduction of a dense symmetric matrix to symmetric band form by
// orthogonal similarity, with the two static look-ahead variants.
//
// Step at leading column k (0-based), j = n - k - w trailing rows:
//   panel  A0 = A[k+w:n, k:k+b']      factored as Q R
//   A1        = A[k+w:n, k+b':k+w]    A1 := Q^T A1
//   A2        = A[k+w:n, k+w:n]       A2 := Q^T A2 Q   (lower triangle)
// with b' = min(b, j-1); the loop runs while j >= 2.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsr/dense.hpp"
#include "tsr/runtime.hpp"

namespace tsr {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class SevpVariant { Reference, V1, V2 };
enum class SevpV2Mapping { A1OnTS, A1OnAll };

struct SevpConfig {
  Index w = 8;
  Index b = 4;
  SevpVariant variant = SevpVariant::Reference;
  SevpV2Mapping v2_mapping = SevpV2Mapping::A1OnTS;
  bool accumulate_q = false;
  Index inner_b = 16;

  /// Throws ConfigError for an illegal (variant, w, b) combination.
  void validate() const {
    if (w < 1) throw ConfigError("bandwidth w must be >= 1");
    if (b < 1 || b > w) throw ConfigError("block size b must satisfy 1 <= b <= w");
    if (inner_b < 1) throw ConfigError("inner block size must be >= 1");
    if (variant == SevpVariant::V1 && 2 * b > w)
      throw ConfigError("variant V1 requires 2b <= w");
  }
};

template <class Scalar>
struct SevpResult {
  Mat<Scalar> band;
  std::optional<Mat<Scalar>> q;
  FlopSnapshot flops;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Working state of a reduction in progress.  panel holds the factors of the
/// panel at column k once it has been factored (look-ahead variants factor
/// it one iteration early).
template <class Scalar>
struct SevpState {
  Mat<Scalar> a;
  std::optional<Mat<Scalar>> q;
  Index w = 1;
  Index b = 1;
  Index inner_b = 16;
  Index k = 0;
  int iterations = 0;
  std::optional<PanelFactors<Scalar>> panel;

  Index n() const { return a.rows(); }
  Index trailing() const { return n() - k - w; }
  bool done() const { return trailing() < 2; }
  Index panel_width() const { return std::min(b, trailing() - 1); }
};

template <class Scalar>
SevpState<Scalar> sevp_begin(const Mat<Scalar>& a, const SevpConfig& cfg) {
  cfg.validate();
  if (a.rows() != a.cols()) throw DimensionError("reduce_sym_band: matrix is not square");
  SevpState<Scalar> s;
  s.a = a;
  s.w = cfg.w;
  s.b = cfg.b;
  s.inner_b = cfg.inner_b;
  if (cfg.accumulate_q) s.q = Mat<Scalar>::Identity(a.rows(), a.rows());
  return s;
}

namespace detail {

// QR of the panel at column k of width bp; the reflector storage below R is
// cleared since the band output keeps only R.
template <class Scalar>
PanelFactors<Scalar> factor_sym_panel(Mat<Scalar>& a, Index k, Index w, Index bp, Index inner_b,
                                      const Workers& wk) {
  const Index j = a.rows() - k - w;
  auto p = a.block(k + w, k, j, bp);
  PanelFactors<Scalar> f = qr_panel<Scalar>(p, inner_b, wk);
  for (Index c = 0; c < bp; ++c) p.col(c).tail(j - c - 1).setZero();
  return f;
}

template <class Scalar>
Region cells(const Mat<Scalar>& a, Index r0, Index r1, Index c0, Index c1) {
  return Region{&a, r0, r1, c0, c1};
}

template <class Scalar>
Task panel_task(SevpState<Scalar>& s, Index k, Index bp, std::optional<PanelFactors<Scalar>>& out,
                const std::string& id) {
  const Index n = s.n();
  return Task{id,
              {cells(s.a, k + s.w, n, k, k + bp), whole(&out)},
              {},
              [&s, &out, k, bp](const Workers& wk) {
                out = factor_sym_panel(s.a, k, s.w, bp, s.inner_b, wk);
              }};
}

template <class Scalar>
Task left_task(SevpState<Scalar>& s, const PanelFactors<Scalar>& f, Index c0, Index c1,
               const std::string& id) {
  const Index n = s.n();
  const Index r0 = s.k + s.w;
  return Task{id,
              {cells(s.a, r0, n, c0, c1)},
              {whole(&f)},
              [&s, &f, r0, c0, c1](const Workers& wk) {
                apply_wy_left<Scalar>(s.a.block(r0, c0, s.n() - r0, c1 - c0), f, wk);
              }};
}

template <class Scalar>
Task q_task(SevpState<Scalar>& s, const PanelFactors<Scalar>& f, const std::string& id) {
  const Index n = s.n();
  const Index c0 = s.k + s.w;
  return Task{id,
              {Region{&*s.q, 0, n, c0, n}},
              {whole(&f)},
              [&s, &f, c0](const Workers& wk) {
                apply_wy_right<Scalar>(s.q->middleCols(c0, s.n() - c0), f, wk);
              }};
}

inline std::string tag(const char* name, int iter) { return std::string(name) + ":" + std::to_string(iter); }

}  // namespace detail

/// One unblocked-schedule step: factor the panel, update A1 and A2.
template <class Scalar>
void sevp_reference_step(SevpState<Scalar>& s, Runtime& rt) {
  if (s.done()) return;
  const Index n = s.n(), k = s.k, w = s.w, bp = s.panel_width();
  const int t = s.iterations;
  std::optional<PanelFactors<Scalar>> f;
  std::vector<Task> tasks;
  tasks.push_back(detail::panel_task(s, k, bp, f, detail::tag("QR", t)));
  rt.run_all("panel", std::move(tasks));
  tasks.clear();
  tasks.push_back(detail::left_task(s, *f, k + bp, k + w, detail::tag("A1", t)));
  tasks.push_back(Task{detail::tag("A2", t),
                       {detail::cells(s.a, k + w, n, k + w, n)},
                       {whole(&*f)},
                       [&s, &f, k, w](const Workers& wk) {
                         const Index j = s.n() - k - w;
                         sym_two_sided_update<Scalar>(s.a.block(k + w, k + w, j, j), *f, wk);
                       }});
  if (s.q) tasks.push_back(detail::q_task(s, *f, detail::tag("Q", t)));
  rt.run_all("update", std::move(tasks));
  s.k += bp;
  ++s.iterations;
}

/// Factors the panel at the current column ahead of a look-ahead step.
template <class Scalar>
void sevp_prologue(SevpState<Scalar>& s, Runtime& rt) {
  if (s.done() || s.panel) return;
  std::vector<Task> tasks;
  tasks.push_back(detail::panel_task(s, s.k, s.panel_width(), s.panel, detail::tag("QR", s.iterations)));
  rt.run_all("prologue", std::move(tasks));
}

/// Look-ahead step for 2b <= w.  The next panel lies inside A1, so TS updates
/// the first b' columns of A1 and factors the next panel while TP updates the
/// rest of A1 and the trailing block.
template <class Scalar>
void sevp_v1_step(SevpState<Scalar>& s, Runtime& rt) {
  if (s.done()) return;
  if (2 * s.b > s.w) throw ConfigError("variant V1 requires 2b <= w");
  sevp_prologue(s, rt);
  const Index n = s.n(), k = s.k, w = s.w;
  const Index bp = s.panel->width();
  const int t = s.iterations;
  const Index k_next = k + bp;
  const Index j_next = n - k_next - w;
  const Index bp_next = j_next >= 2 ? std::min(s.b, j_next - 1) : 0;
  const PanelFactors<Scalar>& f = *s.panel;
  std::optional<PanelFactors<Scalar>> next;

  PhasePlan plan;
  plan.label = detail::tag("v1", t);
  if (bp_next > 0) {
    plan.seq_tasks.push_back(detail::left_task(s, f, k + bp, k + bp + bp_next, detail::tag("A1L", t)));
    plan.seq_tasks.push_back(detail::panel_task(s, k_next, bp_next, next, detail::tag("QR", t + 1)));
  }
  if (k + bp + bp_next < k + w)
    plan.par_tasks.push_back(detail::left_task(s, f, k + bp + bp_next, k + w, detail::tag("A1R", t)));
  plan.par_tasks.push_back(Task{detail::tag("A2", t),
                                {detail::cells(s.a, k + w, n, k + w, n)},
                                {whole(&f)},
                                [&s, &f, k, w](const Workers& wk) {
                                  const Index j = s.n() - k - w;
                                  sym_two_sided_update<Scalar>(s.a.block(k + w, k + w, j, j), f, wk);
                                }});
  if (s.q) plan.par_tasks.push_back(detail::q_task(s, f, detail::tag("Q", t)));
  rt.run_phase(plan);

  s.panel = std::move(next);
  s.k = k_next;
  ++s.iterations;
}

/// Look-ahead step for any b <= w.  Phase 1 updates A1 and forms X1..X3;
/// phase 2 lets TS finish the leading columns of A2 that the next panel
/// spills into and factor that panel while TP updates the rest of A2.
template <class Scalar>
void sevp_v2_step(SevpState<Scalar>& s, Runtime& rt, SevpV2Mapping mapping) {
  if (s.done()) return;
  sevp_prologue(s, rt);
  const Index n = s.n(), k = s.k, w = s.w;
  const Index bp = s.panel->width();
  const int t = s.iterations;
  const Index j = n - k - w;
  const Index k_next = k + bp;
  const Index j_next = n - k_next - w;
  const Index bp_next = j_next >= 2 ? std::min(s.b, j_next - 1) : 0;
  const Index spill = std::clamp(bp + bp_next - w, Index(0), j);
  const PanelFactors<Scalar>& f = *s.panel;
  SymUpdateWork<Scalar> work;
  std::optional<PanelFactors<Scalar>> next;

  Task a1 = detail::left_task(s, f, k + bp, k + w, detail::tag("A1", t));
  Task x = Task{detail::tag("X", t),
                {whole(&work)},
                {detail::cells(s.a, k + w, n, k + w, n), whole(&f)},
                [&s, &f, &work, k, w](const Workers& wk) {
                  const Index jj = s.n() - k - w;
                  work = sym_update_prepare<Scalar>(s.a.block(k + w, k + w, jj, jj), f, wk);
                }};
  if (mapping == SevpV2Mapping::A1OnTS) {
    PhasePlan p1{detail::tag("v2-1", t), {}, {}};
    p1.seq_tasks.push_back(std::move(a1));
    p1.par_tasks.push_back(std::move(x));
    rt.run_phase(p1);
  } else {
    std::vector<Task> tasks;
    tasks.push_back(std::move(a1));
    tasks.push_back(std::move(x));
    rt.run_all(detail::tag("v2-1", t), std::move(tasks));
  }

  auto a2_cols = [&s, &f, &work, k, w](Index c0, Index c1) {
    return [&s, &f, &work, k, w, c0, c1](const Workers& wk) {
      const Index jj = s.n() - k - w;
      sym_update_apply<Scalar>(s.a.block(k + w, k + w, jj, jj), work, f, c0, c1, wk);
    };
  };
  PhasePlan p2{detail::tag("v2-2", t), {}, {}};
  if (bp_next > 0) {
    if (spill > 0)
      p2.seq_tasks.push_back(Task{detail::tag("A2L", t),
                                  {detail::cells(s.a, k + w, n, k + w, k + w + spill)},
                                  {whole(&work), whole(&f)},
                                  a2_cols(0, spill)});
    p2.seq_tasks.push_back(detail::panel_task(s, k_next, bp_next, next, detail::tag("QR", t + 1)));
  }
  const Index tp_begin = bp_next > 0 ? spill : 0;
  if (tp_begin < j)
    p2.par_tasks.push_back(Task{detail::tag("A2R", t),
                                {detail::cells(s.a, k + w, n, k + w + tp_begin, n)},
                                {whole(&work), whole(&f)},
                                a2_cols(tp_begin, j)});
  if (s.q) p2.par_tasks.push_back(detail::q_task(s, f, detail::tag("Q", t)));
  rt.run_phase(p2);

  s.panel = std::move(next);
  s.k = k_next;
  ++s.iterations;
}

/// Mirrors the lower triangle and writes exact zeros outside the band.
template <class Scalar>
Mat<Scalar> sevp_finish(SevpState<Scalar>& s) {
  Mat<Scalar> out = std::move(s.a);
  mirror_lower<Scalar>(out);
  for (Index c = 0; c < out.cols(); ++c)
    for (Index r = 0; r < out.rows(); ++r)
      if (r - c > s.w || c - r > s.w) out(r, c) = Scalar(0);
  return out;
}

template <class Scalar>
SevpResult<Scalar> reduce_sym_band(const Mat<Scalar>& a, const SevpConfig& cfg, Runtime& rt) {
  SevpState<Scalar> s = sevp_begin(a, cfg);
  SevpResult<Scalar> res;
  if (cfg.w >= a.rows()) {
    res.band = a;
    res.q = s.q;
    return res;
  }
  if (cfg.variant == SevpVariant::V2 && 2 * cfg.b <= cfg.w)
    res.warnings.push_back("variant V2 used with 2b <= w; V1 is the intended regime");
  const FlopSnapshot before = rt.snapshot_flops();
  while (!s.done()) {
    switch (cfg.variant) {
      case SevpVariant::Reference: sevp_reference_step(s, rt); break;
      case SevpVariant::V1: sevp_v1_step(s, rt); break;
      case SevpVariant::V2: sevp_v2_step(s, rt, cfg.v2_mapping); break;
    }
  }
  const FlopSnapshot after = rt.snapshot_flops();
  for (int c = 0; c < kFlopClasses; ++c) res.flops.by_class[c] = after.by_class[c] - before.by_class[c];
  res.iterations = s.iterations;
  res.q = std::move(s.q);
  res.band = sevp_finish(s);
  return res;
}

template <class Scalar>
SevpResult<Scalar> reduce_sym_band(const Mat<Scalar>& a, const SevpConfig& cfg,
                                   const ExecGroups& groups = {}) {
  Runtime rt(groups);
  return reduce_sym_band(a, cfg, rt);
}

/// round(4 n^3 / 3).
inline std::uint64_t sevp_nominal_flops(std::uint64_t n) { return (4 * n * n * n + 1) / 3; }

}  // namespace tsr
