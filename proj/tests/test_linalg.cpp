#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "nme/linalg.hpp"
#include "test_support.hpp"

namespace nme {
namespace {

using testing::max_abs_diff;
using testing::random_hermitian;
using testing::random_hpd;
using testing::random_matrix;

TEST(CMatrix, RejectsNonFiniteEntries) {
  std::vector<Complex> e{1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0};
  EXPECT_THROW(CMatrix(2, 2, e), std::invalid_argument);
  EXPECT_THROW(CMatrix(2, 2, std::vector<Complex>(3)), std::invalid_argument);
}

TEST(CMatrix, ProductDimensionMismatchThrows) {
  EXPECT_THROW(CMatrix(2, 3) * CMatrix(2, 3), std::invalid_argument);
}

TEST(HermitianView, RejectsFarFromHermitian) {
  EXPECT_THROW(HermitianView(CMatrix{{1, 2}, {0, 1}}), std::invalid_argument);
  const HermitianView h(CMatrix{{1, 2}, {2 + 1e-14, 1}});
  EXPECT_EQ(h.matrix()(0, 1), h.matrix()(1, 0));
}

TEST(HermitianEig, Identity) {
  const auto d = hermitian_eig(HermitianView(CMatrix::identity(3)));
  for (double v : d.values) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_LE(frobenius_norm(d.vectors.adjoint() * d.vectors - CMatrix::identity(3)), 3e-12);
}

TEST(HermitianEig, DiagonalSortedAscending) {
  const std::vector<double> diag{9, 4};
  const auto d = hermitian_eig(HermitianView(CMatrix::diagonal(diag)));
  EXPECT_DOUBLE_EQ(d.values[0], 4.0);
  EXPECT_DOUBLE_EQ(d.values[1], 9.0);
}

TEST(HermitianEig, AllOnesIsRankOne) {
  const auto d = hermitian_eig(HermitianView(CMatrix::ones(5, 5)));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(d.values[i], 0.0, 1e-14);
  EXPECT_NEAR(d.values[4], 5.0, 1e-14);
}

TEST(HermitianEig, ReconstructionUpToFifty) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1, 2, 3, 7, 16, 31, 50}) {
    const HermitianView h = random_hermitian(rng, n);
    const auto d = hermitian_eig(h);
    const CMatrix rebuilt = d.vectors * CMatrix::diagonal(d.values) * d.vectors.adjoint();
    const double nn = static_cast<double>(n);
    EXPECT_LE(frobenius_norm(rebuilt - h.matrix()), 1e-11 * nn * frobenius_norm(h.matrix()))
        << "n=" << n;
    EXPECT_LE(frobenius_norm(d.vectors.adjoint() * d.vectors - CMatrix::identity(n)), 1e-12 * nn);
    EXPECT_TRUE(std::is_sorted(d.values.begin(), d.values.end()));
  }
}

TEST(Norms, Examples) {
  const CMatrix eye = CMatrix::identity(5);
  const CMatrix e = CMatrix::ones(5, 5);
  EXPECT_NEAR(spectral_norm(CMatrix::identity(3)), 1.0, 1e-15);
  EXPECT_NEAR(frobenius_norm(CMatrix::identity(3)), std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(spectral_norm(0.5 * (eye - e)), 2.0, 1e-14);
  EXPECT_NEAR(frobenius_norm(0.5 * (eye - e)), std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(spectral_norm(eye + 0.25 * e), 2.25, 1e-14);
  EXPECT_NEAR(frobenius_norm(eye + 0.25 * e), std::sqrt(5 * 1.25 * 1.25 + 20 * 0.0625), 1e-14);
  EXPECT_NEAR(frobenius_norm(eye + 0.25 * e), 3.0104, 5e-5);
}

TEST(Norms, SpectralMatchesSingularValueOfRectangular) {
  // [[3, 0], [4, 0], [0, 1]] has singular values 5 and 1.
  EXPECT_NEAR(spectral_norm(CMatrix{{3, 0}, {4, 0}, {0, 1}}), 5.0, 1e-14);
  EXPECT_NEAR(spectral_norm(CMatrix{{3, 4, 0}, {0, 0, 1}}), 5.0, 1e-14);
}

TEST(Norms, SpectralFrobeniusSandwich) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    const CMatrix m = random_matrix(rng, r, c);
    const double s = spectral_norm(m), f = frobenius_norm(m);
    EXPECT_LE(s, f * (1 + 1e-14));
    EXPECT_LE(f, std::sqrt(static_cast<double>(std::min(r, c))) * s * (1 + 1e-14));
  }
}

TEST(HpdPower, Examples) {
  const HermitianView eye(CMatrix::identity(3));
  EXPECT_LE(max_abs_diff(hpd_power(eye, HpdExponent::half).matrix(), eye.matrix()), 1e-15);
  const std::vector<double> d{4, 9};
  const HermitianView h(CMatrix::diagonal(d));
  const CMatrix r = hpd_power(h, HpdExponent::half).matrix();
  EXPECT_NEAR(r(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(r(1, 1).real(), 3.0, 1e-14);
  EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-14);
}

TEST(HpdPower, GroupLaw) {
  std::mt19937_64 rng(5);
  for (std::size_t n : {1, 2, 4, 6}) {
    const HermitianView h = random_hpd(rng, n);
    const CMatrix half = hpd_power(h, HpdExponent::half).matrix();
    const CMatrix quarter = hpd_power(h, HpdExponent::quarter).matrix();
    const CMatrix minus_half = hpd_power(h, HpdExponent::minus_half).matrix();
    const CMatrix minus_one = hpd_power(h, HpdExponent::minus_one).matrix();
    const double hn = frobenius_norm(h.matrix());
    EXPECT_LE(frobenius_norm(half * half - h.matrix()), 1e-11 * hn);
    EXPECT_LE(frobenius_norm(quarter * quarter - half), 1e-11 * frobenius_norm(half));
    EXPECT_LE(frobenius_norm(minus_half * h.matrix() * minus_half - CMatrix::identity(n)), 1e-11);
    EXPECT_LE(frobenius_norm(minus_one * h.matrix() - CMatrix::identity(n)), 1e-11);
  }
}

TEST(HpdPower, RejectsIndefinite) {
  const std::vector<double> d{1, -1};
  try {
    hpd_power(HermitianView(CMatrix::diagonal(d)), HpdExponent::half);
    FAIL() << "expected NotPositiveDefiniteError";
  } catch (const NotPositiveDefiniteError& e) {
    EXPECT_DOUBLE_EQ(e.eigenvalue(), -1.0);
  }
  const std::vector<double> tiny{1, 1e-16};
  EXPECT_THROW(hpd_power(HermitianView(CMatrix::diagonal(tiny)), HpdExponent::minus_one),
               NotPositiveDefiniteError);
}

TEST(Kron, IdentityGivesBlockDiagonal) {
  const CMatrix b{{1, 2}, {3, 4}};
  const CMatrix k = kron(CMatrix::identity(2), b);
  EXPECT_EQ(k.rows(), 4u);
  EXPECT_EQ(k.block(0, 0, 2, 2)(1, 0), Complex(3));
  EXPECT_EQ(k.block(2, 2, 2, 2)(0, 1), Complex(2));
  EXPECT_EQ(k(0, 2), Complex(0));
  EXPECT_LE(max_abs_diff(k, block_diag_lift(b, 2)), 0.0);
}

TEST(Kron, ScalarCase) {
  const CMatrix k = kron(CMatrix{{Complex(2, 1)}}, CMatrix{{Complex(0, 3)}});
  EXPECT_EQ(k(0, 0), Complex(2, 1) * Complex(0, 3));
}

TEST(Kron, VecIdentity) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const CMatrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2),
                  m = random_matrix(rng, 2, 2);
    EXPECT_LE(max_abs_diff(kron(a, b) * vec(m), vec(b * m * a.transpose())), 1e-13);
  }
}

TEST(Vec, ColumnStacking) {
  const CMatrix m{{1, 2}, {3, 4}};
  const CMatrix v = vec(m);
  EXPECT_EQ(v(1, 0), Complex(3));
  EXPECT_EQ(v(2, 0), Complex(2));
  EXPECT_LE(max_abs_diff(unvec(v, 2, 2), m), 0.0);
}

TEST(VecPermutation, SmallCases) {
  EXPECT_EQ(vec_permutation(1)(0, 0), Complex(1));
  const CMatrix p = vec_permutation(2);
  const CMatrix expected{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
  EXPECT_LE(max_abs_diff(p, expected), 0.0);
  const CMatrix p3 = vec_permutation(3);
  EXPECT_LE(max_abs_diff(p3 * p3, CMatrix::identity(9)), 0.0);
  EXPECT_THROW(vec_permutation(0), std::invalid_argument);
}

TEST(VecPermutation, TransposesEveryBasisMatrix) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const CMatrix p = vec_permutation(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CMatrix e(n, n);
        e(i, j) = 1.0;
        ASSERT_LE(max_abs_diff(p * vec(e), vec(e.transpose())), 0.0) << n << ' ' << i << ' ' << j;
      }
    }
  }
}

TEST(LinearSolve, Examples) {
  const CMatrix rhs{{1, 2}, {3, 4}};
  EXPECT_LE(max_abs_diff(linear_solve(CMatrix::identity(2), rhs), rhs), 0.0);
  const std::vector<double> d{2, 4};
  const CMatrix x = linear_solve(CMatrix::diagonal(d), CMatrix::identity(2));
  EXPECT_DOUBLE_EQ(x(0, 0).real(), 0.5);
  EXPECT_DOUBLE_EQ(x(1, 1).real(), 0.25);
}

TEST(LinearSolve, RandomResidual) {
  std::mt19937_64 rng(21);
  const CMatrix m = random_matrix(rng, 10, 10) + Complex(10) * CMatrix::identity(10);
  const CMatrix rhs = random_matrix(rng, 10, 3);
  const CMatrix x = linear_solve(m, rhs);
  EXPECT_LE(frobenius_norm(m * x - rhs), 1e-10 * frobenius_norm(rhs));
}

TEST(LinearSolve, SingularReportsPivot) {
  try {
    linear_solve(CMatrix{{1, 2}, {2, 4}}, CMatrix::identity(2));
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_LE(e.pivot(), 1e-12);
  }
}

TEST(Cholesky, FactorsHpd) {
  std::mt19937_64 rng(4);
  const HermitianView h = random_hpd(rng, 5);
  const CMatrix l = cholesky(h);
  EXPECT_LE(frobenius_norm(l * l.adjoint() - h.matrix()), 1e-12 * frobenius_norm(h.matrix()));
  EXPECT_EQ(l(0, 3), Complex(0));
  const std::vector<double> d{1, -2};
  EXPECT_THROW(cholesky(HermitianView(CMatrix::diagonal(d))), NotPositiveDefiniteError);
}

TEST(BlockDiagLift, NormScaling) {
  std::mt19937_64 rng(6);
  const CMatrix z = random_matrix(rng, 3, 3);
  EXPECT_LE(max_abs_diff(block_diag_lift(z, 1), z), 0.0);
  for (std::size_t m : {1, 2, 3, 5}) {
    for (NormKind k : {NormKind::spectral, NormKind::frobenius}) {
      const double lifted = norm(block_diag_lift(z, m), k);
      EXPECT_NEAR(lifted, theta(k, m) * norm(z, k), 1e-12 * lifted);
    }
  }
  EXPECT_DOUBLE_EQ(theta(NormKind::spectral, 4), 1.0);
  EXPECT_DOUBLE_EQ(theta(NormKind::frobenius, 4), 2.0);
}

TEST(RealRepresentation, Layout) {
  const CMatrix w{{Complex(1, 2)}};
  const CMatrix r = real_representation(w);
  const CMatrix expected{{1, -2}, {2, 1}};
  EXPECT_LE(max_abs_diff(r, expected), 0.0);
}

}  // namespace
}  // namespace nme
