#pragma once

// Dense kernels for the band reductions: a deterministic tiled GEMM and its
// symmetric relatives, Householder reflectors, left-looking blocked QR/LQ
// panels and compact-WY application.
//
// Every kernel computes each output element with a fixed summation order
// over the inner dimension.  Parallelism only splits the output into
// disjoint tiles, so the result bits do not depend on the worker count or on
// how a caller slices the output into sub-blocks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "tsr/thread_team.hpp"

namespace tsr {

using Index = Eigen::Index;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Mutable column-major view with an explicit leading dimension.
template <class Scalar>
using MatRef = Eigen::Ref<Mat<Scalar>, 0, Eigen::OuterStride<>>;
/// Read-only view; blocks of column-major matrices bind without copying.
template <class Scalar>
using ConstMatRef = Eigen::Ref<const Mat<Scalar>, 0, Eigen::OuterStride<>>;

template <class T>
using NoDeduce = std::type_identity_t<T>;

using Matrix = Mat<double>;

enum class Op { NoTrans, Trans };

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

inline constexpr Index kTileRows = 96;
inline constexpr Index kTileCols = 24;
inline constexpr Index kChunk = 128;

// C(rows, cols) := alpha * acc + beta * C where acc(i, j) = sum_p a(i, p) * b(p, j)
// accumulated for p = 0, 1, ..., depth-1 in that order.  beta == 0 ignores the
// previous content of C.  a and b are element accessors.
template <class Scalar, class GetA, class GetB>
void tiled_product(Index rows, Index cols, Index depth, const GetA& a, const GetB& b,
                   Scalar alpha, Scalar beta, MatRef<Scalar> c, const Workers& wk) {
  if (rows == 0 || cols == 0) return;
  if (alpha == Scalar(0) || depth == 0) {
    if (beta == Scalar(0)) {
      c.setZero();
    } else if (beta != Scalar(1)) {
      for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) c(i, j) = beta * c(i, j);
    }
    return;
  }
  const Index row_tiles = (rows + kTileRows - 1) / kTileRows;
  const Index col_tiles = (cols + kTileCols - 1) / kTileCols;
  wk.parallel_for(row_tiles * col_tiles, [&](std::ptrdiff_t tile) {
    const Index i0 = (tile % row_tiles) * kTileRows;
    const Index j0 = (tile / row_tiles) * kTileCols;
    const Index mb = std::min(kTileRows, rows - i0);
    const Index nb = std::min(kTileCols, cols - j0);
    std::vector<Scalar> acc(static_cast<std::size_t>(mb * nb), Scalar(0));
    std::vector<Scalar> pack(static_cast<std::size_t>(mb * kChunk));
    for (Index p0 = 0; p0 < depth; p0 += kChunk) {
      const Index pb = std::min(kChunk, depth - p0);
      for (Index p = 0; p < pb; ++p)
        for (Index i = 0; i < mb; ++i) pack[p * mb + i] = a(i0 + i, p0 + p);
      for (Index p = 0; p < pb; ++p) {
        const Scalar* ap = pack.data() + p * mb;
        for (Index jj = 0; jj < nb; ++jj) {
          const Scalar bpj = b(p0 + p, j0 + jj);
          Scalar* accj = acc.data() + jj * mb;
          for (Index i = 0; i < mb; ++i) accj[i] = accj[i] + ap[i] * bpj;
        }
      }
    }
    for (Index jj = 0; jj < nb; ++jj) {
      for (Index i = 0; i < mb; ++i) {
        const Scalar v = acc[jj * mb + i];
        Scalar& out = c(i0 + i, j0 + jj);
        out = beta == Scalar(0) ? alpha * v : alpha * v + beta * out;
      }
    }
  });
}

template <class Scalar>
Scalar stable_norm(const Scalar* x, Index n) {
  Scalar scale(0);
  for (Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(x[i]));
  if (scale == Scalar(0)) return Scalar(0);
  Scalar ssq(0);
  for (Index i = 0; i < n; ++i) {
    const Scalar t = x[i] / scale;
    ssq = ssq + t * t;
  }
  return scale * std::sqrt(ssq);
}

}  // namespace detail

/// C := alpha * op(A) * op(B) + beta * C.
template <class Scalar>
void matmul(Scalar alpha, Op opa, NoDeduce<ConstMatRef<Scalar>> a, Op opb,
            NoDeduce<ConstMatRef<Scalar>> b, Scalar beta, NoDeduce<MatRef<Scalar>> c,
            const Workers& wk = {}) {
  const Index m = opa == Op::NoTrans ? a.rows() : a.cols();
  const Index k = opa == Op::NoTrans ? a.cols() : a.rows();
  const Index kb = opb == Op::NoTrans ? b.rows() : b.cols();
  const Index n = opb == Op::NoTrans ? b.cols() : b.rows();
  detail::require(k == kb && c.rows() == m && c.cols() == n, "matmul: non-conformal operands");
  wk.count(FlopClass::Gemm, 2ull * static_cast<std::uint64_t>(m * n * k));
  auto get_b = [&](Index p, Index j) { return opb == Op::NoTrans ? b(p, j) : b(j, p); };
  if (opa == Op::NoTrans) {
    detail::tiled_product<Scalar>(m, n, k, [&](Index i, Index p) { return a(i, p); }, get_b,
                                  alpha, beta, c, wk);
  } else {
    detail::tiled_product<Scalar>(m, n, k, [&](Index i, Index p) { return a(p, i); }, get_b,
                                  alpha, beta, c, wk);
  }
}

/// X := S * W where S is symmetric and only its lower triangle is read.
template <class Scalar>
void symm_lower(NoDeduce<ConstMatRef<Scalar>> s, NoDeduce<ConstMatRef<Scalar>> w,
                NoDeduce<MatRef<Scalar>> x, const Workers& wk = {}) {
  const Index n = s.rows();
  detail::require(s.cols() == n && w.rows() == n && x.rows() == n && x.cols() == w.cols(),
                  "symm_lower: non-conformal operands");
  wk.count(FlopClass::Symm, 2ull * static_cast<std::uint64_t>(n * n * w.cols()));
  detail::tiled_product<Scalar>(
      n, w.cols(), n, [&](Index i, Index p) { return p <= i ? s(i, p) : s(p, i); },
      [&](Index p, Index j) { return w(p, j); }, Scalar(1), Scalar(0), x, wk);
}

/// Lower-triangle rank-2k update restricted to columns [col_begin, col_end):
/// C(i, j) += sum_p (X(i,p) Y(j,p) + Y(i,p) X(j,p)) for i >= j.
/// The per-element arithmetic does not depend on the column range, so any
/// column partition reproduces the unpartitioned result exactly.
template <class Scalar>
void syr2k_lower(NoDeduce<MatRef<Scalar>> c, NoDeduce<ConstMatRef<Scalar>> x,
                 NoDeduce<ConstMatRef<Scalar>> y, Index col_begin, Index col_end,
                 const Workers& wk = {}) {
  const Index n = c.rows();
  const Index k = x.cols();
  detail::require(c.cols() == n && x.rows() == n && y.rows() == n && y.cols() == k,
                  "syr2k_lower: non-conformal operands");
  detail::require(0 <= col_begin && col_begin <= col_end && col_end <= n,
                  "syr2k_lower: column range out of bounds");
  std::uint64_t elems = 0;
  for (Index j = col_begin; j < col_end; ++j) elems += static_cast<std::uint64_t>(n - j);
  wk.count(FlopClass::Syr2k, 4ull * static_cast<std::uint64_t>(k) * elems);
  if (k == 0) return;
  const Index cols = col_end - col_begin;
  constexpr Index kCols = 8;
  wk.parallel_for((cols + kCols - 1) / kCols, [&](std::ptrdiff_t tile) {
    std::vector<Scalar> acc;
    const Index jb = col_begin + tile * kCols;
    const Index je = std::min(col_end, jb + kCols);
    for (Index j = jb; j < je; ++j) {
      const Index len = n - j;
      acc.assign(static_cast<std::size_t>(len), Scalar(0));
      for (Index p = 0; p < k; ++p) {
        const Scalar yj = y(j, p);
        const Scalar xj = x(j, p);
        const Scalar* xp = x.data() + p * x.outerStride() + j;
        const Scalar* yp = y.data() + p * y.outerStride() + j;
        for (Index i = 0; i < len; ++i) {
          Scalar t = acc[i] + xp[i] * yj;
          acc[i] = t + yp[i] * xj;
        }
      }
      Scalar* cj = c.data() + j * c.outerStride() + j;
      for (Index i = 0; i < len; ++i) cj[i] = cj[i] + acc[i];
    }
  });
}

/// Reflector H = I - tau v v^T with v[0] = 1 and H x = beta e1.
template <class Scalar>
struct Householder {
  Vec<Scalar> v;
  Scalar tau{0};
  Scalar beta{0};
};

/// Builds the reflector annihilating x[1:].  beta = -sign(x[0]) * ||x||
/// (x[0] = 0 counts as positive).  When x[1:] is already zero the reflector
/// is the identity: tau = 0 and beta = x[0].
template <class Scalar>
Householder<Scalar> house_gen(const Vec<Scalar>& x, const Workers& wk = {}) {
  const Index n = x.size();
  detail::require(n >= 1, "house_gen: empty vector");
  Householder<Scalar> h;
  h.v = Vec<Scalar>::Zero(n);
  h.v(0) = Scalar(1);
  const Scalar alpha = x(0);
  const Scalar tail = detail::stable_norm(x.data() + 1, n - 1);
  wk.count(FlopClass::Panel, 3ull * static_cast<std::uint64_t>(n));
  if (tail == Scalar(0)) {
    h.tau = Scalar(0);
    h.beta = alpha;
    return h;
  }
  const Scalar norm = std::hypot(alpha, tail);
  h.beta = alpha >= Scalar(0) ? -norm : norm;
  h.tau = (h.beta - alpha) / h.beta;
  const Scalar scale = Scalar(1) / (alpha - h.beta);
  for (Index i = 1; i < n; ++i) h.v(i) = x(i) * scale;
  return h;
}

/// The b Householder reflectors of a panel in compact WY form:
/// Q = H_0 H_1 ... H_{b-1} = I + W Y^T with W = Y T.
template <class Scalar>
struct PanelFactors {
  Mat<Scalar> y;    ///< j x b, unit lower trapezoidal
  Mat<Scalar> t;    ///< b x b, upper triangular
  Mat<Scalar> w;    ///< j x b
  Mat<Scalar> tri;  ///< R (QR panel, upper) or L (LQ panel, lower), b x b
  Vec<Scalar> tau;

  Index order() const { return y.rows(); }
  Index width() const { return y.cols(); }
};

/// W := Y T for upper triangular T; column c only sums reflectors 0..c.
template <class Scalar>
Mat<Scalar> build_w(const Mat<Scalar>& y, const Mat<Scalar>& t, const Workers& wk = {}) {
  detail::require(t.rows() == t.cols() && y.cols() == t.rows(), "build_w: non-conformal operands");
  const Index j = y.rows(), b = y.cols();
  Mat<Scalar> w(j, b);
  for (Index c = 0; c < b; ++c)
    for (Index i = 0; i < j; ++i) {
      Scalar acc(0);
      for (Index p = 0; p <= c; ++p) acc = acc + y(i, p) * t(p, c);
      w(i, c) = acc;
    }
  wk.count(FlopClass::Gemm, static_cast<std::uint64_t>(j * b * (b + 1)));
  return w;
}

/// Left-looking blocked Householder QR of a j x b panel (j >= b).  On return
/// the upper triangle of the leading b x b block of P holds R and the
/// reflector vectors sit below the diagonal; the factors carry Y, T and W.
template <class Scalar>
PanelFactors<Scalar> qr_panel(NoDeduce<MatRef<Scalar>> p, Index inner_b = 16,
                              const Workers& wk = {}) {
  const Index j = p.rows();
  const Index b = p.cols();
  detail::require(b >= 1 && j >= b, "qr_panel: need rows >= cols >= 1");
  detail::require(inner_b >= 1, "qr_panel: inner block size must be positive");
  PanelFactors<Scalar> f;
  f.y = Mat<Scalar>::Zero(j, b);
  f.t = Mat<Scalar>::Zero(b, b);
  f.tau = Vec<Scalar>::Zero(b);
  Workers panel_wk{nullptr, wk.flops};

  for (Index c0 = 0; c0 < b; c0 += inner_b) {
    const Index cb = std::min(inner_b, b - c0);
    auto blk = p.middleCols(c0, cb);
    if (c0 > 0) {
      // Q_prev^T blk = blk + Y T^T (Y^T blk), only the reflectors found so far.
      auto yp = f.y.leftCols(c0);
      auto tp = f.t.topLeftCorner(c0, c0);
      Mat<Scalar> tmp(c0, cb);
      Mat<Scalar> tmp2(c0, cb);
      matmul<Scalar>(Scalar(1), Op::Trans, yp, Op::NoTrans, blk, Scalar(0), tmp, panel_wk);
      matmul<Scalar>(Scalar(1), Op::Trans, tp, Op::NoTrans, tmp, Scalar(0), tmp2, panel_wk);
      matmul<Scalar>(Scalar(1), Op::NoTrans, yp, Op::NoTrans, tmp2, Scalar(1), blk, panel_wk);
    }
    for (Index c = c0; c < c0 + cb; ++c) {
      const Index len = j - c;
      Vec<Scalar> x = p.col(c).tail(len);
      Householder<Scalar> h = house_gen(x, panel_wk);
      p(c, c) = h.beta;
      for (Index i = 1; i < len; ++i) p(c + i, c) = h.v(i);
      f.y(c, c) = Scalar(1);
      f.y.col(c).tail(len - 1) = h.v.tail(len - 1);
      f.tau(c) = h.tau;
      // Apply H_c to the rest of the inner block.
      for (Index q = c + 1; q < c0 + cb; ++q) {
        Scalar s(0);
        for (Index i = 0; i < len; ++i) s = s + h.v(i) * p(c + i, q);
        const Scalar ts = h.tau * s;
        for (Index i = 0; i < len; ++i) p(c + i, q) = p(c + i, q) - ts * h.v(i);
      }
      wk.count(FlopClass::Panel, 4ull * static_cast<std::uint64_t>(len * (c0 + cb - c - 1)));
      // T(0:c, c) = -tau T(0:c, 0:c) (Y(:, 0:c)^T v);  T(c, c) = -tau.
      f.t(c, c) = -h.tau;
      if (c > 0) {
        Vec<Scalar> z(c);
        for (Index q = 0; q < c; ++q) {
          Scalar s(0);
          for (Index i = c; i < j; ++i) s = s + f.y(i, q) * f.y(i, c);
          z(q) = s;
        }
        for (Index r = 0; r < c; ++r) {
          Scalar s(0);
          for (Index q = r; q < c; ++q) s = s + f.t(r, q) * z(q);
          f.t(r, c) = -h.tau * s;
        }
        wk.count(FlopClass::Panel, static_cast<std::uint64_t>(2 * c * len + c * c));
      }
    }
  }
  f.w = build_w(f.y, f.t, panel_wk);
  f.tri = p.topRows(b).template triangularView<Eigen::Upper>();
  return f;
}

/// Row-wise dual of qr_panel for a b x j panel (j >= b): P = L V^T with
/// V = I + W Y^T.  On return the leading b x b block holds L (lower) and the
/// reflector vectors sit to the right of the diagonal.
template <class Scalar>
PanelFactors<Scalar> lq_panel(NoDeduce<MatRef<Scalar>> p, Index inner_b = 16,
                              const Workers& wk = {}) {
  detail::require(p.rows() >= 1 && p.cols() >= p.rows(), "lq_panel: need cols >= rows >= 1");
  Mat<Scalar> pt = p.transpose();
  PanelFactors<Scalar> f = qr_panel<Scalar>(pt, inner_b, wk);
  p = pt.transpose();
  f.tri.transposeInPlace();
  return f;
}

/// A := Q^T A = A + Y (W^T A).
template <class Scalar>
void apply_wy_left(NoDeduce<MatRef<Scalar>> a, const PanelFactors<Scalar>& f,
                   const Workers& wk = {}) {
  detail::require(a.rows() == f.order(), "apply_wy_left: row count differs from reflector order");
  if (a.cols() == 0) return;
  Mat<Scalar> tmp(f.width(), a.cols());
  matmul<Scalar>(Scalar(1), Op::Trans, f.w, Op::NoTrans, a, Scalar(0), tmp, wk);
  matmul<Scalar>(Scalar(1), Op::NoTrans, f.y, Op::NoTrans, tmp, Scalar(1), a, wk);
}

/// A := A Q = A + (A W) Y^T.
template <class Scalar>
void apply_wy_right(NoDeduce<MatRef<Scalar>> a, const PanelFactors<Scalar>& f,
                    const Workers& wk = {}) {
  detail::require(a.cols() == f.order(), "apply_wy_right: column count differs from reflector order");
  if (a.rows() == 0) return;
  Mat<Scalar> tmp(a.rows(), f.width());
  matmul<Scalar>(Scalar(1), Op::NoTrans, a, Op::NoTrans, f.w, Scalar(0), tmp, wk);
  matmul<Scalar>(Scalar(1), Op::NoTrans, tmp, Op::Trans, f.y, Scalar(1), a, wk);
}

/// Intermediate products of the two-sided symmetric update.
template <class Scalar>
struct SymUpdateWork {
  Mat<Scalar> x1;  ///< A2 W
  Mat<Scalar> x2;  ///< 1/2 X1^T W
  Mat<Scalar> x3;  ///< X1 + Y X2
};

/// First half of A2 := Q^T A2 Q: X1 := A2 W, X2 := 1/2 X1^T W, X3 := X1 + Y X2.
template <class Scalar>
SymUpdateWork<Scalar> sym_update_prepare(NoDeduce<ConstMatRef<Scalar>> a2,
                                         const PanelFactors<Scalar>& f, const Workers& wk = {}) {
  detail::require(a2.rows() == a2.cols() && a2.rows() == f.order(),
                  "sym_update: dimension differs from reflector order");
  SymUpdateWork<Scalar> s;
  const Index n = a2.rows();
  const Index b = f.width();
  s.x1.resize(n, b);
  s.x2.resize(b, b);
  symm_lower<Scalar>(a2, f.w, s.x1, wk);
  matmul<Scalar>(Scalar(0.5), Op::Trans, s.x1, Op::NoTrans, f.w, Scalar(0), s.x2, wk);
  s.x3 = s.x1;
  matmul<Scalar>(Scalar(1), Op::NoTrans, f.y, Op::NoTrans, s.x2, Scalar(1), s.x3, wk);
  return s;
}

/// Second half, on lower-triangle columns [col_begin, col_end) of A2:
/// A2 := A2 + X3 Y^T + Y X3^T.
template <class Scalar>
void sym_update_apply(NoDeduce<MatRef<Scalar>> a2, const SymUpdateWork<Scalar>& s,
                      const PanelFactors<Scalar>& f, Index col_begin, Index col_end,
                      const Workers& wk = {}) {
  syr2k_lower<Scalar>(a2, s.x3, f.y, col_begin, col_end, wk);
}

/// A2 := Q^T A2 Q on the lower triangle of a symmetric A2.
template <class Scalar>
void sym_two_sided_update(NoDeduce<MatRef<Scalar>> a2, const PanelFactors<Scalar>& f,
                          const Workers& wk = {}) {
  const SymUpdateWork<Scalar> s = sym_update_prepare<Scalar>(a2, f, wk);
  sym_update_apply<Scalar>(a2, s, f, 0, a2.cols(), wk);
}

/// Copies the strict lower triangle onto the strict upper triangle.
template <class Scalar>
void mirror_lower(NoDeduce<MatRef<Scalar>> a) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j + 1; i < a.rows(); ++i) a(j, i) = a(i, j);
}

}  // namespace tsr
