#pragma once

// Slow, independent checks for the reductions: cyclic Jacobi eigenvalues,
// one-sided Jacobi singular values, band pattern and orthogonality residuals.

#include <stdexcept>
#include <vector>

#include "tsr/dense.hpp"

namespace tsr {

class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SpectrumReport {
  std::vector<double> values;  ///< sorted descending
  double max_abs_offband = 0;
  double residual = 0;
};

/// Eigenvalues of a symmetric matrix, sorted descending.  Throws
/// std::invalid_argument if S is not symmetric within 1e-12 ||S||_F and
/// ConvergenceError after 100 sweeps.
std::vector<double> jacobi_eigen(const Matrix& s);

/// Singular values, sorted descending (one-sided Jacobi on the columns of A,
/// or of A^T when A is wide).
std::vector<double> jacobi_svd(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// max |B(i,j)| over i - j > lower_bw or j - i > upper_bw (0 if none).
double band_check(const Matrix& b, Index lower_bw, Index upper_bw);

/// ||Q^T Q - I||_F.
double orth_residual(const Matrix& q);

struct SpectraMatch {
  bool ok = false;
  double max_dev = 0;
};

/// Element-wise comparison of two sorted lists; lists of different length
/// never match.
SpectraMatch spectra_match(const std::vector<double>& a, const std::vector<double>& b, double tol);

}  // namespace tsr
