#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nme/equation.hpp"
#include "nme/matrix.hpp"

namespace nme {

/// Coefficient perturbation (ΔA₁, …, ΔA_m; ΔQ) of an EquationInstance.
struct Perturbation {
  std::vector<CMatrix> d_blocks;
  HermitianView d_q;

  /// Throws std::invalid_argument when block count or dimensions disagree.
  void check_against(const EquationInstance& inst) const;
  CMatrix stacked() const { return vstack(d_blocks); }
  bool is_zero() const;
};

/// Zero perturbation shaped for the instance.
Perturbation zero_perturbation(const EquationInstance& inst);

/// Coefficients Ã = A + ΔA, Q̃ = Q + ΔQ. Throws std::invalid_argument when Q̃
/// is not positive definite.
EquationInstance perturbed_instance(const EquationInstance& inst, const Perturbation& pert);

struct BoundResult {
  std::string name;
  std::optional<NormKind> norm;
  bool applicable = false;
  std::optional<double> value;  // present iff applicable
  std::vector<std::pair<std::string, double>> diagnostics;
  std::string note;  // reason for inapplicability

  std::optional<double> diagnostic(const std::string& key) const;
};

/// K_U = min{θ_U(m)‖X̂⁻¹A‖, ‖X̂⁻¹A‖_U}.
double k_u(const HermitianView& x_l, const EquationInstance& inst, NormKind norm);

/// Smaller root S of ‖X_L⁻¹‖S² − bS + c = 0 bounding ‖ΔX_L‖_U, valid when
/// K_U‖X̂⁻¹A‖ < 1 and 2‖ΔA‖_U + ‖ΔQ‖_U < (1 − √(K_U‖X̂⁻¹A‖))²/‖X_L⁻¹‖.
BoundResult bound_serr(const EquationInstance& inst, const HermitianView& x_l,
                       const Perturbation& pert, NormKind norm);

/// The same bound after the congruence X ↦ P⁻¹XP⁻¹, scaled back by ‖P‖².
/// Usable when ‖X̂⁻¹A‖ ≥ 1 but ‖(I⊗PX⁻¹)AP⁻¹‖ < 1.
BoundResult bound_serr_scaled(const EquationInstance& inst, const HermitianView& x_l,
                              const Perturbation& pert, NormKind norm, const HermitianView& p);

/// A-priori bound needing neither solution; spectral norm throughout.
BoundResult bound_hasb17(const EquationInstance& inst, const Perturbation& pert);

/// Bound using X_L only; spectral norm throughout.
BoundResult bound_yinwf14(const EquationInstance& inst, const HermitianView& x_l,
                          const Perturbation& pert);

/// Non-local bound on ‖ΔX_L‖_F from the Fréchet-derivative operators and a
/// Lyapunov majorant.
BoundResult bound_konppa11(const EquationInstance& inst, const HermitianView& x_l,
                           const Perturbation& pert);

/// Maximal solution of the perturbed equation, tracked as the correction
/// D = X̃ − X_L so that small perturbations keep full relative accuracy.
struct PerturbedSolution {
  HermitianView x_tilde;
  HermitianView delta_x;
  std::size_t iterations = 0;
  double residual = 0.0;  // ‖X̃ + Ã*X̃̂⁻¹Ã − Q̃‖_F in the correction form
};

/// Runs X_{k+1} = Q̃ − Ã* X̂_k⁻¹ Ã from X₀ = Q̃, written in terms of
/// D_k = X_k − X_L. The unperturbed residual at X_L is treated as zero.
PerturbedSolution solve_perturbed(const EquationInstance& inst, const HermitianView& x_l,
                                  const Perturbation& pert, const SolveOptions& options = {});

/// Ã* X̃⁻¹ Ã − A* X⁻¹ A for X̃ = X + D, evaluated without cancellation.
HermitianView coupling_difference(const EquationInstance& inst, const HermitianView& x,
                                  const Perturbation& pert, const HermitianView& d);

/// A scaling matrix choice for the S_err family. An identity choice selects
/// the unscaled bound.
struct ScalingChoice {
  std::string label;  // "id", "sqrtQ", "p1"
  std::optional<HermitianView> p;  // empty for identity
};

ScalingChoice scaling_identity();
ScalingChoice scaling_sqrt_q(const EquationInstance& inst);
/// P₁ = Q^{1/2} + 4·Q^{1/4}.
ScalingChoice scaling_p1(const EquationInstance& inst);

struct CompareRequest {
  bool konppa11 = true;
  bool yinwf14 = true;
  bool hasb17 = true;
  bool serr = true;
  std::vector<NormKind> norms{NormKind::spectral, NormKind::frobenius};
  std::vector<std::string> scalings{"id", "sqrtQ", "p1"};
};

struct BoundComparison {
  std::string column;  // konppa11, yinwf14, hasb17, has, has_sqrtQ, has_F_P1, ...
  BoundResult bound;
  std::optional<double> ratio;  // bound / ‖ΔX_L‖ in the bound's own norm
};

struct ComparisonRecord {
  SolveReport unperturbed;
  PerturbedSolution perturbed;
  double actual_spec = 0.0;
  double actual_frob = 0.0;
  std::vector<BoundComparison> bounds;  // in column order
};

/// Labels which equation a solver failure came from.
class ComparisonSolveError : public SolverError {
 public:
  ComparisonSolveError(std::string which, const std::string& what)
      : SolverError(which + " equation: " + what), which_(std::move(which)) {}
  const std::string& which() const { return which_; }

 private:
  std::string which_;
};

/// Column name for an S_err-family bound, e.g. ("has", frobenius, "sqrtQ") →
/// "has_F_sqrtQ".
std::string serr_column(NormKind norm, const std::string& scaling);

/// Solves both equations and evaluates every requested bound with its ratio.
ComparisonRecord solve_perturbed_and_compare(const EquationInstance& inst,
                                             const Perturbation& pert,
                                             const CompareRequest& request = {},
                                             const SolveOptions& options = {});

}  // namespace nme
