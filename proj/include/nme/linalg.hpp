#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nme/matrix.hpp"

namespace nme {

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a matrix expected to be positive definite is not.
class NotPositiveDefiniteError : public LinalgError {
 public:
  NotPositiveDefiniteError(const std::string& what, double eigenvalue)
      : LinalgError(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class SingularMatrixError : public LinalgError {
 public:
  SingularMatrixError(const std::string& what, double pivot)
      : LinalgError(what), pivot_(pivot) {}
  double pivot() const { return pivot_; }

 private:
  double pivot_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // unitary, columns are eigenvectors
};

/// Cyclic complex Jacobi. Rotations are skipped once |h_pq| falls below
/// eps·sqrt(|h_pp h_qq|), which keeps small eigenvalues relatively accurate.
EigenDecomposition hermitian_eig(const HermitianView& h);

double min_eigenvalue(const HermitianView& h);
double max_eigenvalue(const HermitianView& h);

double spectral_norm(const CMatrix& m);
double frobenius_norm(const CMatrix& m);
double norm(const CMatrix& m, NormKind kind);

enum class HpdExponent { half, quarter, minus_half, minus_one };

/// V·diag(λ^p)·V* for positive definite H. Throws NotPositiveDefiniteError when
/// the smallest eigenvalue is not above 1e-14·λ_max.
HermitianView hpd_power(const HermitianView& h, HpdExponent p);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Column-stacking vec: an r×c matrix becomes an rc×1 column.
CMatrix vec(const CMatrix& m);
CMatrix unvec(const CMatrix& v, std::size_t rows, std::size_t cols);

/// n²×n² permutation Π with Π·vec(M) = vec(Mᵀ).
CMatrix vec_permutation(std::size_t n);

/// I_m ⊗ Z.
CMatrix block_diag_lift(const CMatrix& z, std::size_t m);

/// LU with partial pivoting. Throws SingularMatrixError when a pivot is at
/// or below n·eps·max|m_ij|.
CMatrix linear_solve(const CMatrix& m, const CMatrix& rhs);
CMatrix inverse(const CMatrix& m);

/// Lower-triangular L with H = L·L*. Throws NotPositiveDefiniteError on a
/// non-positive pivot.
CMatrix cholesky(const HermitianView& h);

/// Solves L·Y = B for lower-triangular L.
CMatrix forward_substitute(const CMatrix& lower, const CMatrix& b);

/// 2r×2c real representation [[Re W, −Im W], [Im W, Re W]].
CMatrix real_representation(const CMatrix& w);

}  // namespace nme
