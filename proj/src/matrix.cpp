#include "nme/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nme {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw std::invalid_argument("CMatrix: entry count does not match dimensions");
  }
  if (!all_finite()) throw std::invalid_argument("CMatrix: non-finite entry");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("CMatrix: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw std::invalid_argument("CMatrix: non-finite entry");
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::ones(std::size_t rows, std::size_t cols) {
  return CMatrix(rows, cols, std::vector<Complex>(rows * cols, Complex(1.0)));
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

CMatrix CMatrix::conj() const {
  CMatrix r = *this;
  for (auto& z : r.entries_) z = std::conj(z);
  return r;
}

CMatrix CMatrix::real_part() const {
  CMatrix r = *this;
  for (auto& z : r.entries_) z = z.real();
  return r;
}

CMatrix CMatrix::imag_part() const {
  CMatrix r = *this;
  for (auto& z : r.entries_) z = z.imag();
  return r;
}

Complex CMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

CMatrix CMatrix::block(std::size_t row, std::size_t col, std::size_t nrows,
                       std::size_t ncols) const {
  if (row + nrows > rows_ || col + ncols > cols_) {
    throw std::out_of_range("CMatrix::block: out of range");
  }
  CMatrix r(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < ncols; ++j) r(i, j) = (*this)(row + i, col + j);
  return r;
}

void CMatrix::set_block(std::size_t row, std::size_t col, const CMatrix& b) {
  if (row + b.rows() > rows_ || col + b.cols() > cols_) {
    throw std::out_of_range("CMatrix::set_block: out of range");
  }
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(row + i, col + j) = b(i, j);
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  require_same_shape(*this, o, "operator+");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  require_same_shape(*this, o, "operator-");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : entries_) z *= s;
  return *this;
}

bool CMatrix::all_finite() const {
  for (const auto& z : entries_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator-(CMatrix a) { return a *= -1.0; }
CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, Complex s) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("operator*: inner dimensions differ (" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                ")");
  }
  CMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

CMatrix vstack(std::span<const CMatrix> blocks) {
  if (blocks.empty()) return {};
  std::size_t rows = 0;
  const std::size_t cols = blocks.front().cols();
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw std::invalid_argument("vstack: column count differs");
    rows += b.rows();
  }
  CMatrix r(rows, cols);
  std::size_t at = 0;
  for (const auto& b : blocks) {
    r.set_block(at, 0, b);
    at += b.rows();
  }
  return r;
}

CMatrix hstack(std::span<const CMatrix> blocks) {
  if (blocks.empty()) return {};
  std::size_t cols = 0;
  const std::size_t rows = blocks.front().rows();
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw std::invalid_argument("hstack: row count differs");
    cols += b.cols();
  }
  CMatrix r(rows, cols);
  std::size_t at = 0;
  for (const auto& b : blocks) {
    r.set_block(0, at, b);
    at += b.cols();
  }
  return r;
}

namespace {

double frobenius(const CMatrix& m) {
  double s = 0.0;
  for (const auto& z : m.entries()) s += std::norm(z);
  return std::sqrt(s);
}

CMatrix average_with_adjoint(const CMatrix& m) {
  CMatrix r = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return r;
}

}  // namespace

HermitianView::HermitianView(const CMatrix& m) {
  if (!m.square()) throw std::invalid_argument("HermitianView: matrix is not square");
  const double skew = frobenius(m - m.adjoint());
  if (skew > 1e-12 * (1.0 + frobenius(m))) {
    throw std::invalid_argument("HermitianView: matrix is not Hermitian (||M - M*||_F = " +
                                std::to_string(skew) + ")");
  }
  m_ = average_with_adjoint(m);
}

HermitianView HermitianView::hermitian_part(const CMatrix& m) {
  if (!m.square()) throw std::invalid_argument("HermitianView: matrix is not square");
  return HermitianView(Unchecked{}, average_with_adjoint(m));
}

double theta(NormKind kind, std::size_t m) {
  return kind == NormKind::spectral ? 1.0 : std::sqrt(static_cast<double>(m));
}

const char* to_string(NormKind kind) {
  return kind == NormKind::spectral ? "spectral" : "frobenius";
}

}  // namespace nme
