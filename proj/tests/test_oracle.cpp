#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "tsr/oracle.hpp"

using namespace tsr;

TEST(JacobiEigen, Diagonal) {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 3, 1, 2;
  EXPECT_EQ(jacobi_eigen(a), (std::vector<double>{3, 2, 1}));
}

TEST(JacobiEigen, TwoByTwo) {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const auto ev = jacobi_eigen(a);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], 3.0, 1e-15);
  EXPECT_NEAR(ev[1], 1.0, 1e-15);
}

TEST(JacobiEigen, TraceAndFrobeniusInvariants) {
  const Matrix a = testutil::random_symmetric(16, 2);
  const auto ev = jacobi_eigen(a);
  const double sum = std::accumulate(ev.begin(), ev.end(), 0.0);
  double sq = 0;
  for (double v : ev) sq += v * v;
  EXPECT_NEAR(sum, a.trace(), 1e-12 * a.norm());
  EXPECT_NEAR(std::sqrt(sq), a.norm(), 1e-12 * a.norm());
  EXPECT_TRUE(std::is_sorted(ev.rbegin(), ev.rend()));
}

TEST(JacobiEigen, RejectsNonSymmetric) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_THROW(jacobi_eigen(a), std::invalid_argument);
}

TEST(JacobiSvd, Diagonal) {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 2, -5;
  const auto sv = jacobi_svd(a);
  EXPECT_DOUBLE_EQ(sv[0], 5.0);
  EXPECT_DOUBLE_EQ(sv[1], 2.0);
}

TEST(JacobiSvd, Permutation) {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  EXPECT_EQ(jacobi_svd(a), (std::vector<double>{1, 1}));
}

TEST(JacobiSvd, AgreesWithGramEigenvalues) {
  const Matrix a = testutil::random_matrix(12, 8, 3);
  const auto sv = jacobi_svd(a);
  const auto ev = jacobi_eigen(testutil::naive_product(Matrix(a.transpose()), a));
  ASSERT_EQ(sv.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(sv[i] * sv[i], ev[i], 1e-12 * ev[0]);
  const auto svt = jacobi_svd(Matrix(a.transpose()));
  EXPECT_TRUE(spectra_match(sv, svt, 1e-13 * sv[0]).ok);
}

TEST(SpectralNorm, KnownValue) {
  Matrix a(2, 2);
  a << 3, 0, 4, 5;
  EXPECT_NEAR(spectral_norm(a), std::sqrt(45.0), 1e-14);
}

TEST(BandCheck, ReportsLargestOffBandEntry) {
  Matrix a = Matrix::Ones(5, 5);
  EXPECT_EQ(band_check(a, 4, 4), 0.0);
  a(4, 0) = -7;
  EXPECT_EQ(band_check(a, 3, 4), 7.0);
  EXPECT_EQ(band_check(a, 1, 1), 7.0);
  Matrix b = Matrix::Zero(5, 5);
  b(0, 3) = 2;
  EXPECT_EQ(band_check(b, 0, 2), 2.0);
  EXPECT_EQ(band_check(b, 0, 3), 0.0);
}

TEST(OrthResidual, Rotation) {
  const double c = std::cos(0.3), s = std::sin(0.3);
  Matrix q(2, 2);
  q << c, -s, s, c;
  EXPECT_LE(orth_residual(q), 1e-15);
  EXPECT_NEAR(orth_residual(2 * q), std::sqrt(18.0), 1e-14);
}

TEST(SpectraMatch, ToleranceAndLength) {
  const std::vector<double> a{3, 2, 1};
  EXPECT_TRUE(spectra_match(a, {3, 2, 1.05}, 0.1).ok);
  EXPECT_NEAR(spectra_match(a, {3, 2, 1.05}, 0.1).max_dev, 0.05, 1e-15);
  EXPECT_FALSE(spectra_match(a, {3, 2, 1.5}, 0.1).ok);
  EXPECT_FALSE(spectra_match(a, {3, 2}, 1.0).ok);
}
