#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "nme/bounds.hpp"
#include "nme/equation.hpp"
#include "nme/linalg.hpp"

namespace nme::testing {

inline CMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                             bool complex_entries = true) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), complex_entries ? g(rng) : 0.0);
  return m;
}

inline HermitianView random_hermitian(std::mt19937_64& rng, std::size_t n) {
  const CMatrix b = random_matrix(rng, n, n);
  return HermitianView::hermitian_part(b + b.adjoint());
}

/// B B* + shift·I, well conditioned.
inline HermitianView random_hpd(std::mt19937_64& rng, std::size_t n, double shift = 1.0) {
  const CMatrix b = random_matrix(rng, n, n);
  return HermitianView::hermitian_part(b * b.adjoint() +
                                       Complex(shift * static_cast<double>(n)) *
                                           CMatrix::identity(n));
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

/// Random instance whose existence margin is exactly `margin`.
inline EquationInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                        double margin) {
  const HermitianView q = random_hpd(rng, n);
  std::vector<CMatrix> blocks;
  for (std::size_t i = 0; i < m; ++i) blocks.push_back(random_matrix(rng, n, n));
  const double current = existence_margin(EquationInstance(blocks, q));
  for (auto& a : blocks) a *= Complex(margin / current);
  return EquationInstance(std::move(blocks), q);
}

inline Perturbation random_perturbation(std::mt19937_64& rng, const EquationInstance& inst,
                                        double scale) {
  std::vector<CMatrix> d;
  for (std::size_t i = 0; i < inst.m(); ++i)
    d.push_back(Complex(scale) * random_matrix(rng, inst.n(), inst.n()));
  const HermitianView dq = random_hermitian(rng, inst.n());
  return Perturbation{std::move(d), HermitianView::hermitian_part(Complex(scale) * dq.matrix())};
}

}  // namespace nme::testing
