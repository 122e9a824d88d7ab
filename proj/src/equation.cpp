#include "nme/equation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nme {

namespace {

constexpr double kRhoTol = 1e-10;
constexpr std::size_t kRhoMaxIter = 100'000;

std::vector<CMatrix> check_blocks(std::vector<CMatrix> blocks, std::size_t n) {
  if (blocks.empty()) throw std::invalid_argument("EquationInstance: need at least one block");
  if (n == 0) throw std::invalid_argument("EquationInstance: Q must be at least 1x1");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].rows() != n || blocks[i].cols() != n) {
      throw std::invalid_argument("EquationInstance: block A" + std::to_string(i + 1) +
                                  " is not " + std::to_string(n) + "x" + std::to_string(n));
    }
  }
  return blocks;
}

std::vector<CMatrix> inverse_times_blocks(const EquationInstance& inst, const HermitianView& x) {
  std::vector<CMatrix> c;
  c.reserve(inst.m());
  for (const auto& a : inst.blocks()) c.push_back(linear_solve(x.matrix(), a));
  return c;
}

CMatrix apply_positive_map(const std::vector<CMatrix>& c, const CMatrix& z) {
  CMatrix w(z.rows(), z.cols());
  for (const auto& ci : c) w += ci.adjoint() * z * ci;
  return w;
}

SpectralRadiusEstimate kronecker_norm_powers(const std::vector<CMatrix>& c) {
  const std::size_t n = c.front().rows();
  CMatrix k(n * n, n * n);
  for (const auto& ci : c) k += kron(ci.transpose(), ci.adjoint());

  SpectralRadiusEstimate est;
  est.used_fallback = true;
  CMatrix power = k;
  double log_scale = 0.0;
  double prev = -1.0;
  // power = K^(2^p) / exp(log_scale)
  for (int p = 0; p <= 40; ++p) {
    const double nu = spectral_norm(power);
    if (nu == 0.0) {
      est.value = 0.0;
      est.accuracy = 0.0;
      return est;
    }
    const double exponent = std::ldexp(1.0, -p);
    const double value = std::exp((std::log(nu) + log_scale) * exponent);
    est.value = value;
    est.iterations = static_cast<std::size_t>(p) + 1;
    if (prev >= 0.0) {
      est.accuracy = std::abs(value - prev) / value;
      if (est.accuracy <= kRhoTol) break;
    }
    prev = value;
    const CMatrix normalized = power * Complex(1.0 / nu);
    power = normalized * normalized;
    log_scale = 2.0 * (log_scale + std::log(nu));
  }
  return est;
}

}  // namespace

EquationInstance::EquationInstance(std::vector<CMatrix> blocks, HermitianView q)
    : blocks_(check_blocks(std::move(blocks), q.size())), q_(std::move(q)) {
  const double lo = min_eigenvalue(q_);
  if (!(lo > 0.0)) {
    throw std::invalid_argument("EquationInstance: Q is not positive definite (smallest "
                                "eigenvalue " +
                                std::to_string(lo) + ")");
  }
  stacked_ = vstack(blocks_);
}

HermitianView coupling_term(const std::vector<CMatrix>& blocks, const HermitianView& x) {
  const CMatrix l = cholesky(x);
  CMatrix s(x.size(), x.size());
  for (const auto& a : blocks) {
    const CMatrix c = forward_substitute(l, a);
    s += c.adjoint() * c;
  }
  return HermitianView::hermitian_part(s);
}

double existence_margin(const EquationInstance& inst) {
  const HermitianView q_inv_half = hpd_power(inst.q(), HpdExponent::minus_half);
  return spectral_norm(block_diag_lift(q_inv_half, inst.m()) * inst.stacked() *
                       q_inv_half.matrix());
}

double residual(const EquationInstance& inst, const HermitianView& x) {
  HermitianView s = [&] {
    try {
      return coupling_term(inst.blocks(), x);
    } catch (const NotPositiveDefiniteError&) {
      // Indefinite but nonsingular X still has a residual.
      CMatrix acc(x.size(), x.size());
      for (const auto& a : inst.blocks()) acc += a.adjoint() * linear_solve(x.matrix(), a);
      return HermitianView::hermitian_part(acc);
    }
  }();
  return frobenius_norm(x.matrix() + s.matrix() - inst.q().matrix());
}

CMatrix lifted_inverse_times(const EquationInstance& inst, const HermitianView& x) {
  return linear_solve(block_diag_lift(x.matrix(), inst.m()), inst.stacked());
}

SolveReport solve_maximal(const EquationInstance& inst, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_maximal: tol must be positive");
  const CMatrix& q = inst.q().matrix();
  const double target = options.tol * frobenius_norm(q);

  HermitianView x = inst.q();
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= options.max_iter; ++k) {
    if (options.on_iterate) options.on_iterate(k, x.matrix());
    HermitianView s = [&] {
      try {
        return coupling_term(inst.blocks(), x);
      } catch (const NotPositiveDefiniteError& e) {
        throw NoSolutionError("solve_maximal: iterate " + std::to_string(k) +
                                  " lost positive definiteness; no maximal solution found (" +
                                  e.what() + ")",
                              k);
      }
    }();
    r = frobenius_norm(x.matrix() + s.matrix() - q);
    if (r <= target) {
      SolveReport report{x, k, r, existence_margin(inst), 0.0, 0.0};
      report.gamma = spectral_norm(lifted_inverse_times(inst, x));
      report.rho = stein_spectral_radius(inst, x);
      return report;
    }
    x = HermitianView::hermitian_part(q - s.matrix());
  }
  throw NonConvergenceError("solve_maximal: no convergence after " +
                                std::to_string(options.max_iter) +
                                " iterations (last residual " + std::to_string(r) + ")",
                            r);
}

namespace {

EquationInstance normalized_instance(const EquationInstance& inst) {
  const HermitianView q_inv_half = hpd_power(inst.q(), HpdExponent::minus_half);
  std::vector<CMatrix> b;
  b.reserve(inst.m());
  for (const auto& a : inst.blocks()) b.push_back(q_inv_half.matrix() * a * q_inv_half.matrix());
  return EquationInstance(std::move(b), HermitianView(CMatrix::identity(inst.n())));
}

}  // namespace

NormalizedInstance::NormalizedInstance(const EquationInstance& inst)
    : q_half_(hpd_power(inst.q(), HpdExponent::half)), normalized_(normalized_instance(inst)) {}

HermitianView NormalizedInstance::back_map(const HermitianView& y) const {
  return HermitianView::hermitian_part(q_half_.matrix() * y.matrix() * q_half_.matrix());
}

NormalizedInstance normalize(const EquationInstance& inst) { return NormalizedInstance(inst); }

SpectralRadiusEstimate stein_spectral_radius_estimate(const EquationInstance& inst,
                                                      const HermitianView& x) {
  const std::vector<CMatrix> c = inverse_times_blocks(inst, x);
  const std::size_t n = inst.n();

  SpectralRadiusEstimate est;
  CMatrix z = CMatrix::identity(n) * Complex(1.0 / static_cast<double>(n));
  double prev = -1.0;
  for (std::size_t k = 1; k <= kRhoMaxIter; ++k) {
    const CMatrix w = apply_positive_map(c, z);
    const double t = w.trace().real();
    est.iterations = k;
    if (!(t > std::numeric_limits<double>::min())) {
      // Φ(I) = 0 only when every X⁻¹Aᵢ vanishes; otherwise Φ is nilpotent on
      // this orbit and the Kronecker route decides.
      if (frobenius_norm(w) == 0.0 && k == 1) {
        est.value = 0.0;
        est.accuracy = 0.0;
        return est;
      }
      break;
    }
    est.value = t;
    if (prev >= 0.0) {
      est.accuracy = std::abs(t - prev) / t;
      if (est.accuracy <= kRhoTol) return est;
    }
    prev = t;
    z = HermitianView::hermitian_part(w * Complex(1.0 / t)).matrix();
  }
  SpectralRadiusEstimate fallback = kronecker_norm_powers(c);
  fallback.iterations += est.iterations;
  return fallback;
}

double stein_spectral_radius(const EquationInstance& inst, const HermitianView& x) {
  return stein_spectral_radius_estimate(inst, x).value;
}

MaximalityCertificate maximality_certificate(const EquationInstance& inst,
                                             const HermitianView& x, const HermitianView& p) {
  // Fails loudly when P is not positive definite.
  static_cast<void>(cholesky(p));
  const CMatrix p_xinv = p.matrix() * inverse(x.matrix());
  const CMatrix m = block_diag_lift(p_xinv, inst.m()) * inst.stacked() * inverse(p.matrix());
  MaximalityCertificate cert;
  cert.norm_value = spectral_norm(m);
  cert.holds = cert.norm_value < 1.0;
  return cert;
}

}  // namespace nme
