#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nme/linalg.hpp"
#include "nme/matrix.hpp"

namespace nme {

/// Coefficients of X + Σᵢ Aᵢ* X⁻¹ Aᵢ = Q: m square blocks Aᵢ of order n and a
/// Hermitian positive definite Q.
class EquationInstance {
 public:
  EquationInstance(std::vector<CMatrix> blocks, HermitianView q);

  std::size_t m() const { return blocks_.size(); }
  std::size_t n() const { return q_.size(); }
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  const CMatrix& block(std::size_t i) const { return blocks_.at(i); }
  const HermitianView& q() const { return q_; }
  /// The mn×n matrix A = (A₁; …; A_m).
  const CMatrix& stacked() const { return stacked_; }

 private:
  std::vector<CMatrix> blocks_;
  HermitianView q_;
  CMatrix stacked_;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterate stopped being positive definite; no maximal solution was found.
class NoSolutionError : public SolverError {
 public:
  NoSolutionError(const std::string& what, std::size_t iteration)
      : SolverError(what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(const std::string& what, double last_residual)
      : SolverError(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

struct SolveOptions {
  double tol = 1e-14;  // relative to ‖Q‖_F
  std::size_t max_iter = 1'000'000;
  /// Called with (k, X_k) for every iterate including X₀ = Q.
  std::function<void(std::size_t, const CMatrix&)> on_iterate;
};

struct SolveReport {
  HermitianView x;
  std::size_t iterations = 0;
  double residual = 0.0;          // ‖X + A* X̂⁻¹ A − Q‖_F
  double existence_margin = 0.0;  // ‖(I_m ⊗ Q^{-1/2}) A Q^{-1/2}‖
  double gamma = 0.0;             // ‖X̂⁻¹ A‖
  double rho = 0.0;               // spectral radius of Z ↦ Σ (X⁻¹Aᵢ)* Z (X⁻¹Aᵢ)
};

/// Σᵢ Aᵢ* X⁻¹ Aᵢ via a Cholesky factor of X. Throws NotPositiveDefiniteError.
HermitianView coupling_term(const std::vector<CMatrix>& blocks, const HermitianView& x);

/// ‖(I_m ⊗ Q^{-1/2}) A Q^{-1/2}‖. Below ½ a maximal solution exists in [Q/2, Q].
double existence_margin(const EquationInstance& inst);

/// ‖X + Σᵢ Aᵢ* X⁻¹ Aᵢ − Q‖_F.
double residual(const EquationInstance& inst, const HermitianView& x);

/// (I_m ⊗ X⁻¹) A, the stacked blocks X⁻¹Aᵢ.
CMatrix lifted_inverse_times(const EquationInstance& inst, const HermitianView& x);

/// Fixed-point iteration X₀ = Q, X_{k+1} = Q − Σ Aᵢ* X_k⁻¹ Aᵢ. The iterates
/// decrease monotonically to the maximal solution when one exists.
SolveReport solve_maximal(const EquationInstance& inst, const SolveOptions& options = {});

/// Instance with Q = I and Bᵢ = Q^{-1/2} Aᵢ Q^{-1/2}, plus the map back.
class NormalizedInstance {
 public:
  explicit NormalizedInstance(const EquationInstance& inst);

  const EquationInstance& instance() const { return normalized_; }
  /// Y ↦ Q^{1/2} Y Q^{1/2}.
  HermitianView back_map(const HermitianView& y) const;

 private:
  HermitianView q_half_;
  EquationInstance normalized_;
};

NormalizedInstance normalize(const EquationInstance& inst);

struct SpectralRadiusEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  /// Relative change between the last two estimates.
  double accuracy = 0.0;
  bool used_fallback = false;
};

/// Spectral radius of Φ(Z) = Σᵢ (X⁻¹Aᵢ)* Z (X⁻¹Aᵢ), equal to
/// ρ(Σᵢ (X⁻¹Aᵢ)ᵀ ⊗ (X⁻¹Aᵢ)*). Power iteration on Φ from Z₀ = I with trace
/// normalisation; if that stalls, ‖M^k‖^{1/k} on the explicit Kronecker matrix.
SpectralRadiusEstimate stein_spectral_radius_estimate(const EquationInstance& inst,
                                                      const HermitianView& x);
double stein_spectral_radius(const EquationInstance& inst, const HermitianView& x);

struct MaximalityCertificate {
  bool holds = false;
  double norm_value = 0.0;
};

/// ‖(I_m ⊗ P X⁻¹) A P⁻¹‖ < 1 certifies that the solution X is maximal.
MaximalityCertificate maximality_certificate(const EquationInstance& inst,
                                             const HermitianView& x, const HermitianView& p);

}  // namespace nme
