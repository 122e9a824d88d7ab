#include "nme/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nme {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweeps = 100;

double conj_of(double x) { return x; }
Complex conj_of(Complex z) { return std::conj(z); }
double real_of(double x) { return x; }
double real_of(Complex z) { return z.real(); }

// Cyclic Jacobi on a dense row-major Hermitian matrix; T is double for real
// symmetric input, Complex otherwise. Returns the diagonal after
// convergence, and accumulates eigenvectors into v when v is non-empty.
template <typename T>
std::vector<double> jacobi(std::vector<T>& h, std::vector<T>& v, std::size_t n) {
  auto at = [n](std::vector<T>& m, std::size_t i, std::size_t j) -> T& { return m[i * n + j]; };
  const bool want_vectors = !v.empty();

  bool converged = n <= 1;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T hpq = at(h, p, q);
        const double mag = std::abs(hpq);
        const double app = real_of(at(h, p, p));
        const double aqq = real_of(at(h, q, q));
        if (mag <= std::numeric_limits<double>::min() ||
            mag <= kEps * std::sqrt(std::abs(app * aqq))) {
          at(h, p, q) = T(0);
          at(h, q, p) = T(0);
          continue;
        }
        rotated = true;
        // Real symmetric rotation on the phase-rotated 2x2 block
        // [[app, |hpq|], [|hpq|, aqq]], then undo the phase.
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, t);
        const T s = (t * c / mag) * hpq;
        const T s_conj = conj_of(s);
        // J_pp = c, J_pq = s, J_qp = -conj(s), J_qq = c
        for (std::size_t k = 0; k < n; ++k) {
          const T hkp = at(h, k, p);
          const T hkq = at(h, k, q);
          at(h, k, p) = c * hkp - s_conj * hkq;
          at(h, k, q) = s * hkp + c * hkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T hpk = at(h, p, k);
          const T hqk = at(h, q, k);
          at(h, p, k) = c * hpk - s * hqk;
          at(h, q, k) = s_conj * hpk + c * hqk;
        }
        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const T vkp = at(v, k, p);
            const T vkq = at(v, k, q);
            at(v, k, p) = c * vkp - s_conj * vkq;
            at(v, k, q) = s * vkp + c * vkq;
          }
        }
        at(h, p, q) = T(0);
        at(h, q, p) = T(0);
        at(h, p, p) = real_of(at(h, p, p));
        at(h, q, q) = real_of(at(h, q, q));
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw LinalgError("hermitian_eig: Jacobi sweeps did not converge after " +
                      std::to_string(kMaxSweeps) + " sweeps");
  }
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = real_of(at(h, k, k));
  return d;
}

bool is_real(const CMatrix& m) {
  return std::all_of(m.entries().begin(), m.entries().end(),
                     [](const Complex& z) { return z.imag() == 0.0; });
}

// Unsorted eigenvalues, plus eigenvectors (columns) when vectors != nullptr.
std::vector<double> eig_raw(const CMatrix& m, CMatrix* vectors) {
  const std::size_t n = m.rows();
  const auto src = m.entries();
  if (is_real(m)) {
    std::vector<double> h(n * n), v;
    for (std::size_t i = 0; i < n * n; ++i) h[i] = src[i].real();
    if (vectors) {
      v.assign(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    }
    std::vector<double> d = jacobi(h, v, n);
    if (vectors) {
      *vectors = CMatrix(n, n);
      for (std::size_t i = 0; i < n * n; ++i) (*vectors)(i / n, i % n) = v[i];
    }
    return d;
  }
  std::vector<Complex> h(src.begin(), src.end()), v;
  if (vectors) {
    v.assign(n * n, Complex(0.0));
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }
  std::vector<double> d = jacobi(h, v, n);
  if (vectors) *vectors = CMatrix(n, n, std::move(v));
  return d;
}

}  // namespace

EigenDecomposition hermitian_eig(const HermitianView& view) {
  const std::size_t n = view.size();
  CMatrix v;
  const std::vector<double> d = eig_raw(view.matrix(), &v);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

double min_eigenvalue(const HermitianView& h) {
  const auto d = eig_raw(h.matrix(), nullptr);
  return d.empty() ? 0.0 : *std::min_element(d.begin(), d.end());
}

double max_eigenvalue(const HermitianView& h) {
  const auto d = eig_raw(h.matrix(), nullptr);
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

double spectral_norm(const CMatrix& m) {
  if (m.empty()) return 0.0;
  // Gram matrix on the smaller side.
  const CMatrix gram = m.rows() >= m.cols() ? m.adjoint() * m : m * m.adjoint();
  const double top = max_eigenvalue(HermitianView::hermitian_part(gram));
  return std::sqrt(std::max(top, 0.0));
}

double frobenius_norm(const CMatrix& m) {
  double s = 0.0;
  for (const auto& z : m.entries()) s += std::norm(z);
  return std::sqrt(s);
}

double norm(const CMatrix& m, NormKind kind) {
  return kind == NormKind::spectral ? spectral_norm(m) : frobenius_norm(m);
}

HermitianView hpd_power(const HermitianView& h, HpdExponent p) {
  const auto eig = hermitian_eig(h);
  const std::size_t n = h.size();
  if (n == 0) return h;
  const double lo = eig.values.front();
  const double hi = eig.values.back();
  if (!(lo > 1e-14 * hi) || !(hi > 0.0)) {
    throw NotPositiveDefiniteError(
        "hpd_power: matrix is not positive definite (smallest eigenvalue " +
            std::to_string(lo) + ", largest " + std::to_string(hi) + ")",
        lo);
  }
  auto apply = [p](double x) {
    switch (p) {
      case HpdExponent::half:
        return std::sqrt(x);
      case HpdExponent::quarter:
        return std::sqrt(std::sqrt(x));
      case HpdExponent::minus_half:
        return 1.0 / std::sqrt(x);
      case HpdExponent::minus_one:
        return 1.0 / x;
    }
    return x;
  };
  CMatrix scaled = eig.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = apply(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= f;
  }
  return HermitianView::hermitian_part(scaled * eig.vectors.adjoint());
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return r;
}

CMatrix vec(const CMatrix& m) {
  CMatrix v(m.rows() * m.cols(), 1);
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) v(j * m.rows() + i, 0) = m(i, j);
  return v;
}

CMatrix unvec(const CMatrix& v, std::size_t rows, std::size_t cols) {
  if (v.cols() != 1 || v.rows() != rows * cols) {
    throw std::invalid_argument("unvec: vector length does not match target shape");
  }
  CMatrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = v(j * rows + i, 0);
  return m;
}

CMatrix vec_permutation(std::size_t n) {
  if (n == 0) throw std::invalid_argument("vec_permutation: n must be at least 1");
  // vec(M) index of m_ij is j·n + i; vec(Mᵀ) holds m_ij at i·n + j.
  CMatrix pi(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pi(i * n + j, j * n + i) = 1.0;
  return pi;
}

CMatrix block_diag_lift(const CMatrix& z, std::size_t m) {
  CMatrix r(m * z.rows(), m * z.cols());
  for (std::size_t k = 0; k < m; ++k) r.set_block(k * z.rows(), k * z.cols(), z);
  return r;
}

CMatrix linear_solve(const CMatrix& m, const CMatrix& rhs) {
  if (!m.square()) throw std::invalid_argument("linear_solve: matrix is not square");
  if (rhs.rows() != m.rows()) {
    throw std::invalid_argument("linear_solve: right-hand side has wrong row count");
  }
  const std::size_t n = m.rows();
  CMatrix lu = m;
  CMatrix x = rhs;
  double scale = 0.0;
  for (const auto& z : m.entries()) scale = std::max(scale, std::abs(z));
  const double floor = static_cast<double>(n) * kEps * scale;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > best) {
        best = std::abs(lu(i, k));
        piv = i;
      }
    }
    if (best <= floor || best == 0.0) {
      throw SingularMatrixError("linear_solve: matrix is singular to working precision (pivot " +
                                    std::to_string(best) + " at column " + std::to_string(k) +
                                    ")",
                                best);
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
    }
    const Complex pivot = lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = lu(i, k) / pivot;
      if (f == Complex(0.0)) continue;
      lu(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      Complex s = x(k, j);
      for (std::size_t l = k + 1; l < n; ++l) s -= lu(k, l) * x(l, j);
      x(k, j) = s / lu(k, k);
    }
  }
  return x;
}

CMatrix inverse(const CMatrix& m) { return linear_solve(m, CMatrix::identity(m.rows())); }

CMatrix cholesky(const HermitianView& view) {
  const CMatrix& h = view.matrix();
  const std::size_t n = h.rows();
  CMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = h(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) {
      throw NotPositiveDefiniteError(
          "cholesky: matrix is not positive definite (pivot " + std::to_string(d) + " at " +
              std::to_string(j) + ")",
          d);
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = h(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

CMatrix forward_substitute(const CMatrix& lower, const CMatrix& b) {
  const std::size_t n = lower.rows();
  if (b.rows() != n) throw std::invalid_argument("forward_substitute: row count mismatch");
  CMatrix y = b;
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = y(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y(k, j);
      y(i, j) = s / lower(i, i);
    }
  }
  return y;
}

CMatrix real_representation(const CMatrix& w) {
  const CMatrix re = w.real_part();
  const CMatrix im = w.imag_part();
  CMatrix r(2 * w.rows(), 2 * w.cols());
  r.set_block(0, 0, re);
  r.set_block(0, w.cols(), -im);
  r.set_block(w.rows(), 0, im);
  r.set_block(w.rows(), w.cols(), re);
  return r;
}

}  // namespace nme
