#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nme {

using Complex = std::complex<double>;

/// Dense complex matrix stored row-major. Entries are finite by construction.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  /// Row-wise literal, e.g. `CMatrix{{1, 2}, {3, 4}}`.
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const double> d);
  static CMatrix ones(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return entries_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }
  std::span<const Complex> entries() const { return entries_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  CMatrix real_part() const;
  CMatrix imag_part() const;
  Complex trace() const;

  /// Rows [row, row+nrows) by columns [col, col+ncols).
  CMatrix block(std::size_t row, std::size_t col, std::size_t nrows, std::size_t ncols) const;
  void set_block(std::size_t row, std::size_t col, const CMatrix& b);

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(Complex s);

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, CMatrix a);
CMatrix operator*(CMatrix a, Complex s);

/// Vertical concatenation of equally wide blocks.
CMatrix vstack(std::span<const CMatrix> blocks);
/// Horizontal concatenation of equally tall blocks.
CMatrix hstack(std::span<const CMatrix> blocks);

/// Square Hermitian matrix. Construction rejects inputs with
/// ‖M − M*‖_F > 1e-12·(1 + ‖M‖_F) and stores (M + M*)/2.
class HermitianView {
 public:
  explicit HermitianView(const CMatrix& m);

  /// Hermitian part of a matrix produced by internal arithmetic, where the
  /// skew part is pure rounding. No tolerance check.
  static HermitianView hermitian_part(const CMatrix& m);

  const CMatrix& matrix() const { return m_; }
  std::size_t size() const { return m_.rows(); }
  operator const CMatrix&() const { return m_; }

 private:
  struct Unchecked {};
  HermitianView(Unchecked, CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

enum class NormKind { spectral, frobenius };

/// ‖I_m ⊗ Z‖ / ‖Z‖ for the given norm: 1 (spectral) or √m (Frobenius).
double theta(NormKind kind, std::size_t m);

const char* to_string(NormKind kind);

}  // namespace nme
