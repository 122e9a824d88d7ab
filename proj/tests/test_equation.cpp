#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nme/equation.hpp"
#include "test_support.hpp"

namespace nme {
namespace {

using testing::max_abs_diff;
using testing::random_instance;

EquationInstance scalar(double a, double q) {
  return EquationInstance({CMatrix{{a}}}, HermitianView(CMatrix{{q}}));
}

// Q := X + A*X̂⁻¹A for a known X, assembled with explicit inverses.
EquationInstance with_known_solution(std::vector<CMatrix> blocks, const CMatrix& x) {
  CMatrix q = x;
  const CMatrix x_inv = inverse(x);
  for (const auto& a : blocks) q += a.adjoint() * x_inv * a;
  return EquationInstance(std::move(blocks), HermitianView::hermitian_part(q));
}

const CMatrix kSmallX{{0.5, -1}, {-1, 50}};

EquationInstance small_example() {
  return with_known_solution({CMatrix{{0.1, 1}, {1.5, 10}}, CMatrix{{0.25, 0.1}, {0.1, 1}}},
                             kSmallX);
}

EquationInstance diagonal_example() {
  const CMatrix l1{{1, 0, 0, 0, 1},
                   {-1, 1, 0, 0, 1},
                   {-1, -1, 1, 0, 1},
                   {-1, -1, -1, 1, 1},
                   {-1, -1, -1, -1, 1}};
  const CMatrix l2{{2, 0, 0, 0, 0},
                   {1, 2, 0, 0, 0},
                   {1, 1, 2, 0, 0},
                   {0, 1, 1, 2, 0},
                   {0, 0, 1, 1, 2}};
  const std::vector<double> d{0.725, 2, 3, 2, 1};
  return with_known_solution({(2 * std::sqrt(3.0) / 45) * l1, (1.0 / 15) * l2},
                             CMatrix::diagonal(d));
}

TEST(EquationInstance, Validation) {
  EXPECT_THROW(EquationInstance({}, HermitianView(CMatrix::identity(2))), std::invalid_argument);
  EXPECT_THROW(EquationInstance({CMatrix(2, 3)}, HermitianView(CMatrix::identity(2))),
               std::invalid_argument);
  const std::vector<double> d{1, -1};
  EXPECT_THROW(EquationInstance({CMatrix(2, 2)}, HermitianView(CMatrix::diagonal(d))),
               std::invalid_argument);
  const EquationInstance inst = small_example();
  EXPECT_EQ(inst.m(), 2u);
  EXPECT_EQ(inst.n(), 2u);
  EXPECT_EQ(inst.stacked().rows(), 4u);
}

TEST(ExistenceMargin, Examples) {
  EXPECT_NEAR(existence_margin(small_example()), 0.4964, 5e-5);
  EXPECT_EQ(existence_margin(EquationInstance({CMatrix(3, 3)}, HermitianView(CMatrix::identity(3)))),
            0.0);
  EXPECT_NEAR(existence_margin(scalar(1, 2.5)), 0.4, 1e-15);
}

TEST(SolveMaximal, ScalarClosedForm) {
  const SolveReport r = solve_maximal(scalar(1, 2.5));
  EXPECT_NEAR(r.x.matrix()(0, 0).real(), 2.0, 1e-13);
  EXPECT_LE(r.residual, 1e-14 * 2.5);
  EXPECT_NEAR(r.gamma, 0.5, 1e-13);
  EXPECT_NEAR(r.rho, 0.25, 1e-12);
}

TEST(SolveMaximal, ZeroCouplingGivesQ) {
  std::mt19937_64 rng(1);
  const HermitianView q = testing::random_hpd(rng, 4);
  const SolveReport r = solve_maximal(EquationInstance({CMatrix(4, 4), CMatrix(4, 4)}, q));
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_LE(max_abs_diff(r.x.matrix(), q.matrix()), 0.0);
  EXPECT_EQ(r.rho, 0.0);
}

TEST(SolveMaximal, RecoversDiagonalSolution) {
  const EquationInstance inst = diagonal_example();
  const SolveReport r = solve_maximal(inst);
  const std::vector<double> d{0.725, 2, 3, 2, 1};
  EXPECT_LE(max_abs_diff(r.x.matrix(), CMatrix::diagonal(d)), 1e-12);
  EXPECT_LE(r.residual, 1e-14 * frobenius_norm(inst.q().matrix()));
}

TEST(SolveMaximal, RecoversSmallSolutionAndScalars) {
  const SolveReport r = solve_maximal(small_example());
  EXPECT_LE(max_abs_diff(r.x.matrix(), kSmallX), 1e-11);
  EXPECT_NEAR(r.gamma, 2.5465, 5e-5);
  EXPECT_NEAR(r.existence_margin, 0.4964, 5e-5);
  EXPECT_LE(r.rho, 1.0 + 1e-8);
}

TEST(SolveMaximal, NoSolutionWhenCouplingTooLarge) {
  // q² < 4a² has no real solution; the iterate turns negative.
  try {
    solve_maximal(scalar(2, 1));
    FAIL() << "expected NoSolutionError";
  } catch (const NoSolutionError& e) {
    EXPECT_GE(e.iteration(), 1u);
  }
}

TEST(SolveMaximal, IterationCap) {
  SolveOptions opts;
  opts.max_iter = 2;
  try {
    solve_maximal(small_example(), opts);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_GT(e.last_residual(), 0.0);
  }
  opts.tol = 0.0;
  EXPECT_THROW(solve_maximal(small_example(), opts), std::invalid_argument);
}

TEST(SolveMaximal, IteratesDecreaseInLoewnerOrder) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    const EquationInstance inst = random_instance(rng, 1 + rng() % 5, 1 + rng() % 3, 0.44);
    std::vector<CMatrix> iterates;
    SolveOptions opts;
    opts.on_iterate = [&](std::size_t, const CMatrix& x) { iterates.push_back(x); };
    solve_maximal(inst, opts);
    const double qn = spectral_norm(inst.q().matrix());
    for (std::size_t k = 1; k < iterates.size(); ++k) {
      EXPECT_GE(min_eigenvalue(HermitianView::hermitian_part(iterates[k - 1] - iterates[k])),
                -1e-12 * qn);
    }
  }
}

TEST(Residual, Examples) {
  const EquationInstance inst = small_example();
  EXPECT_LE(residual(inst, HermitianView(kSmallX)), 1e-12 * frobenius_norm(inst.q().matrix()));
  std::mt19937_64 rng(2);
  const HermitianView q = testing::random_hpd(rng, 3);
  EXPECT_LE(residual(EquationInstance({CMatrix(3, 3)}, q), q), 0.0);

  const CMatrix a{{1, 0.5}, {0, 1}};
  const HermitianView q2(CMatrix{{4, 1}, {1, 3}});
  const CMatrix expected = a.adjoint() * inverse(q2.matrix()) * a;
  EXPECT_NEAR(residual(EquationInstance({a}, q2), q2), frobenius_norm(expected), 1e-14);
}

TEST(Residual, SingularThrows) {
  const EquationInstance inst = scalar(1, 2.5);
  EXPECT_THROW(residual(inst, HermitianView(CMatrix{{0.0}})), LinalgError);
}

TEST(Normalize, IdentityQIsUnchanged) {
  const CMatrix a{{0.1, 0.2}, {0.0, 0.3}};
  const EquationInstance inst({a}, HermitianView(CMatrix::identity(2)));
  const NormalizedInstance norm_inst = normalize(inst);
  EXPECT_LE(max_abs_diff(norm_inst.instance().block(0), a), 1e-15);
  const HermitianView y(CMatrix{{2, 1}, {1, 3}});
  EXPECT_LE(max_abs_diff(norm_inst.back_map(y).matrix(), y.matrix()), 1e-15);
}

TEST(Normalize, ZeroCouplingMapsIdentityToQ) {
  std::mt19937_64 rng(9);
  const HermitianView q = testing::random_hpd(rng, 4);
  const NormalizedInstance n = normalize(EquationInstance({CMatrix(4, 4)}, q));
  const SolveReport y = solve_maximal(n.instance());
  EXPECT_LE(max_abs_diff(y.x.matrix(), CMatrix::identity(4)), 1e-15);
  EXPECT_LE(frobenius_norm(n.back_map(y.x).matrix() - q.matrix()),
            1e-12 * frobenius_norm(q.matrix()));
}

TEST(Normalize, RoundTripOnWorkedExamples) {
  for (const EquationInstance& inst : {diagonal_example(), small_example()}) {
    const SolveReport direct = solve_maximal(inst);
    const NormalizedInstance n = normalize(inst);
    const SolveReport y = solve_maximal(n.instance());
    const double err = frobenius_norm(n.back_map(y.x).matrix() - direct.x.matrix());
    EXPECT_LE(err, 1e-10 * frobenius_norm(direct.x.matrix()));
  }
}

TEST(SteinSpectralRadius, Examples) {
  EXPECT_EQ(stein_spectral_radius(EquationInstance({CMatrix(2, 2)}, HermitianView(CMatrix::identity(2))),
                                  HermitianView(CMatrix::identity(2))),
            0.0);
  EXPECT_NEAR(stein_spectral_radius(scalar(1, 2.5), HermitianView(CMatrix{{2.0}})), 0.25, 1e-14);
}

TEST(SteinSpectralRadius, MatchesKroneckerEigenvalueOracle) {
  // At X = I, C = A is triangular, so the eigenvalues of Cᵀ⊗C* are
  // c_ii·conj(c_jj) and ρ = 0.5².
  const CMatrix a{{0.5, 0.3}, {0.0, 0.2}};
  const EquationInstance inst({a}, HermitianView(CMatrix::identity(2)));
  EXPECT_NEAR(stein_spectral_radius(inst, HermitianView(CMatrix::identity(2))), 0.25, 1e-9);
}

TEST(SteinSpectralRadius, NilpotentMapUsesFallback) {
  const CMatrix a{{0.0, 1.0}, {0.0, 0.0}};
  const EquationInstance inst({a}, HermitianView(CMatrix::identity(2)));
  const SpectralRadiusEstimate est =
      stein_spectral_radius_estimate(inst, HermitianView(CMatrix::identity(2)));
  EXPECT_LE(est.value, 1e-6);
}

TEST(SteinSpectralRadius, BoundedBySquaredGamma) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const EquationInstance inst = random_instance(rng, 1 + rng() % 5, 1 + rng() % 3, 0.4);
    const SolveReport r = solve_maximal(inst);
    EXPECT_LE(r.rho, 1.0 + 1e-8);
    EXPECT_LE(r.rho, r.gamma * r.gamma + 1e-8);
  }
}

TEST(MaximalityCertificate, Examples) {
  const EquationInstance inst = small_example();
  const HermitianView x(kSmallX);
  const MaximalityCertificate scaled =
      maximality_certificate(inst, x, hpd_power(inst.q(), HpdExponent::half));
  EXPECT_TRUE(scaled.holds);
  EXPECT_NEAR(scaled.norm_value, 0.7316, 5e-5);
  const MaximalityCertificate plain =
      maximality_certificate(inst, x, HermitianView(CMatrix::identity(2)));
  EXPECT_FALSE(plain.holds);
  EXPECT_NEAR(plain.norm_value, 2.5465, 5e-5);

  const EquationInstance zero({CMatrix(2, 2)}, HermitianView(CMatrix::identity(2)));
  const MaximalityCertificate z =
      maximality_certificate(zero, HermitianView(CMatrix::identity(2)), HermitianView(kSmallX));
  EXPECT_TRUE(z.holds);
  EXPECT_EQ(z.norm_value, 0.0);
}

TEST(SolutionBracket, WithinHalfQAndQ) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const EquationInstance inst = random_instance(rng, 1 + rng() % 6, 1 + rng() % 3, 0.45);
    const SolveReport r = solve_maximal(inst);
    const CMatrix s = hpd_power(inst.q(), HpdExponent::minus_half).matrix();
    const auto eig = hermitian_eig(HermitianView::hermitian_part(s * r.x.matrix() * s));
    EXPECT_GE(eig.values.front(), 0.5 - 1e-10);
    EXPECT_LE(eig.values.back(), 1.0 + 1e-10);
  }
}

}  // namespace
}  // namespace nme
