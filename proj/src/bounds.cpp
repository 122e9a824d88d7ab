#include "nme/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nme {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBoundaryTol = 1e-14;

double norm_of(const CMatrix& m, NormKind kind) { return norm(m, kind); }

// Strict inequality; equality within kBoundaryTol (relative) counts as failure.
bool strictly_less(double lhs, double rhs) {
  if (!(lhs < rhs)) return false;
  return (rhs - lhs) > kBoundaryTol * std::max(std::abs(lhs), std::abs(rhs));
}

BoundResult make_result(std::string name, std::optional<NormKind> norm) {
  BoundResult r;
  r.name = std::move(name);
  r.norm = norm;
  return r;
}

void add(BoundResult& r, const char* key, double v) { r.diagnostics.emplace_back(key, v); }

double sum_of_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

std::vector<double> spectral_norms(const std::vector<CMatrix>& blocks) {
  std::vector<double> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(spectral_norm(b));
  return out;
}

// Shared body of the S_err family. With no P this is the unscaled bound; with
// P = I the arithmetic is bit-identical to it.
BoundResult serr_family(const EquationInstance& inst, const HermitianView& x_l,
                        const Perturbation& pert, NormKind norm,
                        const std::optional<HermitianView>& p) {
  pert.check_against(inst);
  const bool scaled = p.has_value();
  BoundResult r = make_result(scaled ? "serr_scaled" : "serr", norm);
  const std::size_t m = inst.m();
  const CMatrix x_inv = inverse(x_l.matrix());
  const CMatrix d_a = pert.stacked();

  CMatrix lifted;  // (I ⊗ P X⁻¹) A P⁻¹
  double x_inv_norm = 0.0;
  double dq = 0.0;
  double da = 0.0;
  double outer = 1.0;
  if (scaled) {
    static_cast<void>(cholesky(*p));
    const CMatrix& pm = p->matrix();
    const CMatrix p_inv = inverse(pm);
    lifted = block_diag_lift(pm * x_inv, m) * inst.stacked() * p_inv;
    x_inv_norm = spectral_norm(pm * x_inv * pm);
    dq = norm_of(p_inv * pert.d_q.matrix() * p_inv, norm);
    da = norm_of(block_diag_lift(p_inv, m) * d_a * p_inv, norm);
    const double pn = spectral_norm(pm);
    outer = pn * pn;
  } else {
    lifted = block_diag_lift(x_inv, m) * inst.stacked();
    x_inv_norm = spectral_norm(x_inv);
    dq = norm_of(pert.d_q.matrix(), norm);
    da = norm_of(d_a, norm);
  }
  const double gamma = spectral_norm(lifted);
  const double k = std::min(theta(norm, m) * gamma, norm_of(lifted, norm));
  const double kn = k * gamma;

  const double b = 1.0 - kn + x_inv_norm * dq;
  const double c = dq + 2.0 * gamma * da + x_inv_norm * da * da;
  const double disc = b * b - 4.0 * c * x_inv_norm;
  const double lhs = 2.0 * da + dq;
  const double rhs = kn < 1.0 ? std::pow(1.0 - std::sqrt(kn), 2) / x_inv_norm : 0.0;

  add(r, scaled ? "N_P" : "gamma", gamma);
  add(r, scaled ? "K_U_P" : "K_U", k);
  add(r, scaled ? "b_p" : "b", b);
  add(r, scaled ? "c_p" : "c", c);
  add(r, scaled ? "D_p" : "D", disc);
  add(r, scaled ? "norm_PXinvP" : "norm_Xinv", x_inv_norm);
  add(r, "norm_dA", da);
  add(r, "norm_dQ", dq);
  add(r, "condition_lhs", lhs);
  add(r, "condition_rhs", rhs);
  if (scaled) add(r, "norm_P_squared", outer);

  if (!strictly_less(kn, 1.0)) {
    r.note = "K_U*||X^-1 A|| >= 1";
    return r;
  }
  if (!strictly_less(lhs, rhs)) {
    r.note = "perturbation too large: 2||dA|| + ||dQ|| >= (1 - sqrt(K_U*||X^-1 A||))^2 / ||X^-1||";
    return r;
  }
  if (!(disc > 0.0)) {
    r.note = "discriminant not positive";
    return r;
  }
  r.applicable = true;
  // (b − √D)/(2x) rewritten as 2c/(b + √D) to avoid cancellation.
  r.value = outer * 2.0 * c / (b + std::sqrt(disc));
  return r;
}

struct CouplingDifference {
  CMatrix value;
  double magnitude = 0.0;  // sum of the Frobenius norms of the summed terms
};

CouplingDifference coupling_difference_impl(const EquationInstance& inst,
                                            const HermitianView& x, const Perturbation& pert,
                                            const CMatrix& d) {
  const HermitianView y = HermitianView::hermitian_part(x.matrix() + d);
  static_cast<void>(cholesky(y));
  CouplingDifference out{CMatrix(inst.n(), inst.n()), 0.0};
  for (std::size_t i = 0; i < inst.m(); ++i) {
    const CMatrix& a = inst.block(i);
    const CMatrix& da = pert.d_blocks[i];
    const CMatrix a_tilde = a + da;
    const CMatrix t1 = da.adjoint() * linear_solve(y.matrix(), a_tilde);
    const CMatrix t2 = a.adjoint() * linear_solve(y.matrix(), da);
    const CMatrix t3 = linear_solve(y.matrix(), a).adjoint() * d * linear_solve(x.matrix(), a);
    out.value += t1;
    out.value += t2;
    out.value -= t3;
    out.magnitude += frobenius_norm(t1) + frobenius_norm(t2) + frobenius_norm(t3);
  }
  out.value = HermitianView::hermitian_part(out.value).matrix();
  return out;
}

}  // namespace

void Perturbation::check_against(const EquationInstance& inst) const {
  if (d_blocks.size() != inst.m()) {
    throw std::invalid_argument("Perturbation: expected " + std::to_string(inst.m()) +
                                " blocks, got " + std::to_string(d_blocks.size()));
  }
  for (const auto& b : d_blocks) {
    if (b.rows() != inst.n() || b.cols() != inst.n()) {
      throw std::invalid_argument("Perturbation: block dimensions do not match the instance");
    }
  }
  if (d_q.size() != inst.n()) {
    throw std::invalid_argument("Perturbation: dQ dimension does not match the instance");
  }
}

bool Perturbation::is_zero() const {
  auto zero = [](const CMatrix& m) { return frobenius_norm(m) == 0.0; };
  return zero(d_q.matrix()) && std::all_of(d_blocks.begin(), d_blocks.end(), zero);
}

Perturbation zero_perturbation(const EquationInstance& inst) {
  return Perturbation{std::vector<CMatrix>(inst.m(), CMatrix(inst.n(), inst.n())),
                      HermitianView(CMatrix(inst.n(), inst.n()))};
}

EquationInstance perturbed_instance(const EquationInstance& inst, const Perturbation& pert) {
  pert.check_against(inst);
  std::vector<CMatrix> blocks;
  blocks.reserve(inst.m());
  for (std::size_t i = 0; i < inst.m(); ++i) blocks.push_back(inst.block(i) + pert.d_blocks[i]);
  return EquationInstance(std::move(blocks),
                          HermitianView::hermitian_part(inst.q().matrix() + pert.d_q.matrix()));
}

std::optional<double> BoundResult::diagnostic(const std::string& key) const {
  for (const auto& [k, v] : diagnostics) {
    if (k == key) return v;
  }
  return std::nullopt;
}

double k_u(const HermitianView& x_l, const EquationInstance& inst, NormKind norm) {
  const CMatrix lifted = block_diag_lift(inverse(x_l.matrix()), inst.m()) * inst.stacked();
  return std::min(theta(norm, inst.m()) * spectral_norm(lifted), norm_of(lifted, norm));
}

BoundResult bound_serr(const EquationInstance& inst, const HermitianView& x_l,
                       const Perturbation& pert, NormKind norm) {
  return serr_family(inst, x_l, pert, norm, std::nullopt);
}

BoundResult bound_serr_scaled(const EquationInstance& inst, const HermitianView& x_l,
                              const Perturbation& pert, NormKind norm, const HermitianView& p) {
  return serr_family(inst, x_l, pert, norm, p);
}

BoundResult bound_hasb17(const EquationInstance& inst, const Perturbation& pert) {
  pert.check_against(inst);
  BoundResult r = make_result("hasb17", NormKind::spectral);
  const double q_inv = spectral_norm(inverse(inst.q().matrix()));
  const std::vector<double> a = spectral_norms(inst.blocks());
  const std::vector<double> da = spectral_norms(pert.d_blocks);
  const double sa2 = sum_of_squares(a);
  const double dq = spectral_norm(pert.d_q.matrix());
  add(r, "norm_Qinv", q_inv);
  add(r, "sum_norm_A_sq", sa2);
  add(r, "norm_dQ", dq);

  const HermitianView q_tilde =
      HermitianView::hermitian_part(inst.q().matrix() + pert.d_q.matrix());
  try {
    static_cast<void>(cholesky(q_tilde));
  } catch (const NotPositiveDefiniteError&) {
    r.note = "Q + dQ is not positive definite";
    return r;
  }
  const double qt_inv = spectral_norm(inverse(q_tilde.matrix()));
  add(r, "norm_Qtilde_inv", qt_inv);

  double lhs3 = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lhs3 += da[i] * da[i] + 2.0 * a[i] * da[i];
    weighted += da[i] * (2.0 * a[i] + da[i]);
  }
  const double cond1 = q_inv * q_inv * sa2;
  const double rhs2 = (0.5 - q_inv * std::sqrt(sa2)) / q_inv;
  const double rhs3 = (0.25 - qt_inv * qt_inv * sa2) / (qt_inv * qt_inv);
  const double c1 = 1.0 - 4.0 * q_inv * qt_inv * sa2;
  add(r, "condition_i", cond1);
  add(r, "condition_ii_rhs", rhs2);
  add(r, "condition_iii_lhs", lhs3);
  add(r, "condition_iii_rhs", rhs3);
  add(r, "c1", c1);

  if (!strictly_less(cond1, 0.25)) {
    r.note = "condition (i) violated: ||Q^-1||^2 sum ||A_i||^2 >= 1/4";
    return r;
  }
  if (!(dq <= rhs2)) {
    r.note = "condition (ii) violated";
    return r;
  }
  if (!strictly_less(lhs3, rhs3)) {
    r.note = "condition (iii) violated";
    return r;
  }
  if (!(c1 > 0.0)) {
    r.note = "c1 not positive";
    return r;
  }
  r.applicable = true;
  r.value = (dq + 2.0 * qt_inv * weighted) / c1;
  return r;
}

BoundResult bound_yinwf14(const EquationInstance& inst, const HermitianView& x_l,
                          const Perturbation& pert) {
  pert.check_against(inst);
  BoundResult r = make_result("yinwf14", NormKind::spectral);
  const double q_inv = spectral_norm(inverse(inst.q().matrix()));
  const std::vector<double> a = spectral_norms(inst.blocks());
  const std::vector<double> da = spectral_norms(pert.d_blocks);
  const double sa2 = sum_of_squares(a);
  const double dq = spectral_norm(pert.d_q.matrix());
  const double theta_y = 0.25 - q_inv * q_inv * sa2;
  add(r, "theta", theta_y);
  add(r, "norm_Qinv", q_inv);
  add(r, "norm_dQ", dq);

  const HermitianView q_tilde =
      HermitianView::hermitian_part(inst.q().matrix() + pert.d_q.matrix());
  try {
    static_cast<void>(cholesky(q_tilde));
  } catch (const NotPositiveDefiniteError&) {
    r.note = "Q + dQ is not positive definite";
    return r;
  }
  const double qt_inv = spectral_norm(inverse(q_tilde.matrix()));

  double growth = 0.0;   // Σ(‖Ãᵢ‖² − ‖Aᵢ‖²)
  double tilde_sq = 0.0;  // Σ‖Ãᵢ‖²
  double linear = 0.0;    // Σ‖X⁻¹Aᵢ‖‖ΔAᵢ‖
  const CMatrix x_inv = inverse(x_l.matrix());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double at = spectral_norm(inst.block(i) + pert.d_blocks[i]);
    growth += at * at - a[i] * a[i];
    tilde_sq += at * at;
    linear += spectral_norm(x_inv * inst.block(i)) * da[i];
  }
  const double c = 2.0 * std::max(q_inv, qt_inv);
  const double xi = 1.0 - c * c * tilde_sq;
  const double rhs2 = (1.0 - std::sqrt(std::max(0.0, 1.0 - theta_y))) / q_inv;
  const double rhs3 = 0.75 * theta_y / (q_inv * q_inv);
  add(r, "condition_ii_rhs", rhs2);
  add(r, "condition_iii_lhs", growth);
  add(r, "condition_iii_rhs", rhs3);
  add(r, "c", c);
  add(r, "xi", xi);

  if (!strictly_less(0.0, theta_y)) {
    r.note = "condition (i) violated: theta <= 0";
    return r;
  }
  if (!(dq <= rhs2)) {
    r.note = "condition (ii) violated";
    return r;
  }
  if (!strictly_less(growth, rhs3)) {
    r.note = "condition (iii) violated";
    return r;
  }
  if (!(xi > 0.0)) {
    r.note = "xi not positive";
    return r;
  }
  r.applicable = true;
  r.value = (dq + 2.0 * linear + spectral_norm(x_inv) * sum_of_squares(da)) / xi;
  return r;
}

BoundResult bound_konppa11(const EquationInstance& inst, const HermitianView& x_l,
                           const Perturbation& pert) {
  pert.check_against(inst);
  BoundResult r = make_result("konppa11", NormKind::frobenius);
  const std::size_t n = inst.n();
  const std::size_t m = inst.m();
  const std::size_t n2 = n * n;
  const CMatrix x_inv = inverse(x_l.matrix());
  const CMatrix eye = CMatrix::identity(n);

  std::vector<CMatrix> c;  // X⁻¹Aᵢ
  c.reserve(m);
  for (const auto& a : inst.blocks()) c.push_back(x_inv * a);

  CMatrix l = CMatrix::identity(n2);
  for (const auto& ci : c) l -= kron(ci.transpose(), ci.adjoint());
  CMatrix l_inv;
  try {
    l_inv = inverse(l);
  } catch (const SingularMatrixError& e) {
    r.note = std::string("L singular to working precision: ") + e.what();
    return r;
  }
  const CMatrix pi = vec_permutation(n);

  std::vector<CMatrix> gamma;  // Γ = (W_Q^R, M_A1, …, M_Am)
  gamma.reserve(m + 1);
  gamma.push_back(real_representation(l_inv));
  const double k_q = spectral_norm(l_inv);
  add(r, "k_Q", k_q);
  double est1 = k_q * frobenius_norm(pert.d_q.matrix());
  for (std::size_t i = 0; i < m; ++i) {
    const CMatrix w_a = -(l_inv * kron(eye, c[i].adjoint()));
    const CMatrix w_abar = -(l_inv * kron(c[i].transpose(), eye) * pi);
    const CMatrix w_a0 = w_a.real_part();
    const CMatrix w_a1 = w_a.imag_part();
    const CMatrix w_b0 = w_abar.real_part();
    const CMatrix w_b1 = w_abar.imag_part();
    CMatrix mi(2 * n2, 2 * n2);
    mi.set_block(0, 0, w_a0 + w_b0);
    mi.set_block(0, n2, w_b1 - w_a1);
    mi.set_block(n2, 0, w_b1 + w_a1);
    mi.set_block(n2, n2, w_a0 - w_b0);
    est1 += spectral_norm(mi) * frobenius_norm(pert.d_blocks[i]);
    gamma.push_back(std::move(mi));
  }

  std::vector<double> delta;
  delta.reserve(m + 1);
  delta.push_back(frobenius_norm(pert.d_q.matrix()));
  for (const auto& d : pert.d_blocks) delta.push_back(frobenius_norm(d));
  const double delta_norm = std::sqrt(sum_of_squares(delta));

  const double est2 = spectral_norm(hstack(gamma)) * delta_norm;
  double quad = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (delta[i] == 0.0 || delta[j] == 0.0) continue;
      quad += delta[i] * delta[j] * spectral_norm(gamma[i].transpose() * gamma[j]);
    }
  }
  const double est3 = std::sqrt(std::max(quad, 0.0));
  const double est = std::min(est2, est3);

  const double l_inv_norm = k_q;
  const double xn = spectral_norm(x_inv);
  double sum_da2 = 0.0;
  double sum_a1 = 0.0;
  double sum_a2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = spectral_norm(inst.block(i));
    const double d = delta[i + 1];
    sum_da2 += d * d;
    sum_a1 += (2.0 * a + d) * d;
    sum_a2 += (a + d) * (a + d);
  }
  const double a0 = est + l_inv_norm * xn * sum_da2;
  const double a1 = l_inv_norm * xn * xn * sum_a1;
  const double a2 = l_inv_norm * xn * xn * xn * sum_a2;
  const double omega = a1 + 2.0 * std::sqrt(a0 * a2);

  add(r, "est1", est1);
  add(r, "est2", est2);
  add(r, "est3", est3);
  add(r, "est", est);
  add(r, "norm_Linv", l_inv_norm);
  add(r, "a0", a0);
  add(r, "a1", a1);
  add(r, "a2", a2);
  add(r, "omega", omega);

  if (!(omega <= 1.0)) {
    r.note = "delta outside Omega: a1 + 2 sqrt(a0 a2) > 1";
    return r;
  }
  r.applicable = true;
  const double one_minus = 1.0 - a1;
  r.value = 2.0 * a0 / (one_minus + std::sqrt(std::max(0.0, one_minus * one_minus - 4.0 * a0 * a2)));
  return r;
}

HermitianView coupling_difference(const EquationInstance& inst, const HermitianView& x,
                                  const Perturbation& pert, const HermitianView& d) {
  pert.check_against(inst);
  return HermitianView::hermitian_part(coupling_difference_impl(inst, x, pert, d.matrix()).value);
}

PerturbedSolution solve_perturbed(const EquationInstance& inst, const HermitianView& x_l,
                                  const Perturbation& pert, const SolveOptions& options) {
  pert.check_against(inst);
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_perturbed: tol must be positive");
  const std::size_t n = inst.n();
  if (pert.is_zero()) {
    return PerturbedSolution{x_l, HermitianView(CMatrix(n, n)), 0, 0.0};
  }
  const CMatrix& dq = pert.d_q.matrix();
  const double scale =
      frobenius_norm(dq) + spectral_norm(inverse(x_l.matrix())) *
                               (2.0 * frobenius_norm(inst.stacked()) +
                                frobenius_norm(pert.stacked())) *
                               frobenius_norm(pert.stacked());
  const double target = options.tol * scale;

  // D₀ = Q̃ − X_L with Q taken as X_L + A*X̂_L⁻¹A.
  CMatrix d = dq + coupling_term(inst.blocks(), x_l).matrix();
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= options.max_iter; ++k) {
    if (options.on_iterate) options.on_iterate(k, x_l.matrix() + d);
    CouplingDifference g;
    try {
      g = coupling_difference_impl(inst, x_l, pert, d);
    } catch (const NotPositiveDefiniteError& e) {
      throw NoSolutionError("solve_perturbed: iterate " + std::to_string(k) +
                                " lost positive definiteness; no maximal solution found (" +
                                e.what() + ")",
                            k);
    }
    CMatrix next = dq - g.value;
    r = frobenius_norm(d - next);
    const double floor = 8.0 * kEps * (frobenius_norm(dq) + g.magnitude + frobenius_norm(d));
    if (r <= std::max(target, floor)) {
      const HermitianView dx = HermitianView::hermitian_part(d);
      return PerturbedSolution{HermitianView::hermitian_part(x_l.matrix() + d), dx, k, r};
    }
    d = HermitianView::hermitian_part(next).matrix();
  }
  throw NonConvergenceError("solve_perturbed: no convergence after " +
                                std::to_string(options.max_iter) +
                                " iterations (last residual " + std::to_string(r) + ")",
                            r);
}

ScalingChoice scaling_identity() { return ScalingChoice{"id", std::nullopt}; }

ScalingChoice scaling_sqrt_q(const EquationInstance& inst) {
  return ScalingChoice{"sqrtQ", hpd_power(inst.q(), HpdExponent::half)};
}

ScalingChoice scaling_p1(const EquationInstance& inst) {
  const CMatrix p = hpd_power(inst.q(), HpdExponent::half).matrix() +
                    4.0 * hpd_power(inst.q(), HpdExponent::quarter).matrix();
  return ScalingChoice{"p1", HermitianView::hermitian_part(p)};
}

std::string serr_column(NormKind norm, const std::string& scaling) {
  std::string col = norm == NormKind::spectral ? "has" : "has_F";
  if (scaling == "sqrtQ") col += "_sqrtQ";
  if (scaling == "p1") col += "_P1";
  return col;
}

ComparisonRecord solve_perturbed_and_compare(const EquationInstance& inst,
                                             const Perturbation& pert,
                                             const CompareRequest& request,
                                             const SolveOptions& options) {
  pert.check_against(inst);
  auto unperturbed = [&] {
    try {
      return solve_maximal(inst, options);
    } catch (const SolverError& e) {
      throw ComparisonSolveError("unperturbed", e.what());
    }
  }();
  auto perturbed = [&] {
    try {
      static_cast<void>(cholesky(
          HermitianView::hermitian_part(inst.q().matrix() + pert.d_q.matrix())));
      return solve_perturbed(inst, unperturbed.x, pert, options);
    } catch (const SolverError& e) {
      throw ComparisonSolveError("perturbed", e.what());
    } catch (const NotPositiveDefiniteError& e) {
      throw ComparisonSolveError("perturbed", std::string("Q + dQ: ") + e.what());
    }
  }();

  ComparisonRecord rec{unperturbed, perturbed, 0.0, 0.0, {}};
  rec.actual_spec = spectral_norm(perturbed.delta_x.matrix());
  rec.actual_frob = frobenius_norm(perturbed.delta_x.matrix());
  const HermitianView& x_l = unperturbed.x;

  auto push = [&](std::string column, BoundResult b) {
    std::optional<double> ratio;
    if (b.applicable && b.value) {
      const double actual =
          b.norm.value_or(NormKind::spectral) == NormKind::frobenius ? rec.actual_frob
                                                                     : rec.actual_spec;
      if (actual > 0.0) ratio = *b.value / actual;
    }
    rec.bounds.push_back(BoundComparison{std::move(column), std::move(b), ratio});
  };

  if (request.konppa11) push("konppa11", bound_konppa11(inst, x_l, pert));
  if (request.yinwf14) push("yinwf14", bound_yinwf14(inst, x_l, pert));
  if (request.hasb17) push("hasb17", bound_hasb17(inst, pert));
  if (request.serr) {
    std::vector<ScalingChoice> scalings;
    for (const std::string label : {"id", "sqrtQ", "p1"}) {
      if (std::find(request.scalings.begin(), request.scalings.end(), label) ==
          request.scalings.end())
        continue;
      if (label == "id") scalings.push_back(scaling_identity());
      if (label == "sqrtQ") scalings.push_back(scaling_sqrt_q(inst));
      if (label == "p1") scalings.push_back(scaling_p1(inst));
    }
    for (const NormKind norm : {NormKind::spectral, NormKind::frobenius}) {
      if (std::find(request.norms.begin(), request.norms.end(), norm) == request.norms.end())
        continue;
      for (const auto& s : scalings) {
        BoundResult b = s.p ? bound_serr_scaled(inst, x_l, pert, norm, *s.p)
                            : bound_serr(inst, x_l, pert, norm);
        push(serr_column(norm, s.label), std::move(b));
      }
    }
  }
  return rec;
}

}  // namespace nme
