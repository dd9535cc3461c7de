#include "tsr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace tsr {

namespace {

double frobenius(const Matrix& a) {
  double s = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double off_diagonal(const Matrix& a) {
  double s = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

std::vector<double> jacobi_eigen(const Matrix& s) {
  const Index n = s.rows();
  if (s.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix is not square");
  const double norm = frobenius(s);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i)
      if (std::abs(s(i, j) - s(j, i)) > 1e-12 * norm)
        throw std::invalid_argument("jacobi_eigen: matrix is not symmetric");

  Matrix a = s;
  const double tol = 1e-14 * norm;
  for (int sweep = 0;; ++sweep) {
    if (off_diagonal(a) <= tol) break;
    if (sweep == 100) throw ConvergenceError("jacobi_eigen: no convergence after 100 sweeps");
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0) continue;
        // Entries negligible against both diagonal entries are dropped.
        if (sweep > 3 && std::abs(a(p, p)) + 100 * std::abs(apq) == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + 100 * std::abs(apq) == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double sn = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0;
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<double> jacobi_svd(const Matrix& a_in) {
  Matrix u = a_in.rows() >= a_in.cols() ? Matrix(a_in) : Matrix(a_in.transpose());
  const Index m = u.rows(), n = u.cols();
  for (int sweep = 0;; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (Index i = 0; i < m; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0 || std::abs(gamma) <= 1e-14 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
        const double c = 1 / std::sqrt(1 + t * t);
        const double sn = c * t;
        for (Index i = 0; i < m; ++i) {
          const double up = u(i, p), uq = u(i, q);
          u(i, p) = c * up - sn * uq;
          u(i, q) = sn * up + c * uq;
        }
      }
    }
    if (!rotated) break;
    if (sweep == 100) throw ConvergenceError("jacobi_svd: no convergence after 100 sweeps");
  }
  std::vector<double> sv(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    double s = 0;
    for (Index i = 0; i < m; ++i) s += u(i, j) * u(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0;
  return jacobi_svd(a).front();
}

double band_check(const Matrix& b, Index lower_bw, Index upper_bw) {
  double worst = 0;
  for (Index j = 0; j < b.cols(); ++j)
    for (Index i = 0; i < b.rows(); ++i)
      if (i - j > lower_bw || j - i > upper_bw) worst = std::max(worst, std::abs(b(i, j)));
  return worst;
}

double orth_residual(const Matrix& q) {
  double s = 0;
  for (Index j = 0; j < q.cols(); ++j) {
    for (Index i = 0; i < q.cols(); ++i) {
      double g = 0;
      for (Index k = 0; k < q.rows(); ++k) g += q(k, i) * q(k, j);
      const double d = g - (i == j ? 1.0 : 0.0);
      s += d * d;
    }
  }
  return std::sqrt(s);
}

SpectraMatch spectra_match(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return {false, std::numeric_limits<double>::infinity()};
  SpectraMatch r;
  for (std::size_t i = 0; i < a.size(); ++i) r.max_dev = std::max(r.max_dev, std::abs(a[i] - b[i]));
  r.ok = r.max_dev <= tol;
  return r;
}

}  // namespace tsr
