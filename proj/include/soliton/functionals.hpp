#pragma once

// Actions, Nehari and Pohozaev functionals for both models, written once in terms of
// the unified coefficients (a, b, kappa):
//
//   I = 1/2 G + a/2 M - b/2 C - 1/p N
//   J =     G + a   M - kappa S - 2 b C - N
//   P = 1/2 G + 3a/2 M - kappa S - 5b/2 C - 3/p N
//
// with G = int |grad u|^2, M = int u^2, C = int u^2 Phi, S = int u^2 Phi^2,
// N = int |u|^p (or u_+^p for the modified functionals).

#include <cmath>
#include <string>

#include "soliton/em_coupling.hpp"
#include "soliton/params.hpp"
#include "soliton/radial_core.hpp"

namespace soliton {

struct EnergyTerms {
  double gradient = 0.0;   // int |grad u|^2 (flux form)
  double mass = 0.0;       // int u^2
  double coulomb = 0.0;    // int u^2 Phi
  double screening = 0.0;  // int u^2 Phi^2
  double power = 0.0;      // int |u|^p or int u_+^p
};

struct EnergyReport {
  double action = 0.0;
  double nehari = 0.0;
  double pohozaev = 0.0;
  /// G = 2J - P; only defined for c = infinity (zero otherwise).
  double scaling_derivative = 0.0;
  bool has_scaling_derivative = false;
  /// Dual (H^-1) norm of the discrete gradient, using the Riesz map of -Delta + a.
  double gradient_norm = 0.0;
  EnergyTerms terms;
  Coefficients coeffs;

  /// |gradient term| + |mass term|, the natural size of J and P.
  double scale() const noexcept { return std::abs(terms.gradient) + std::abs(coeffs.a * terms.mass); }
};

namespace detail {

inline double power_density(double u, double p, bool positive_part) {
  if (positive_part) return u > 0.0 ? std::pow(u, p) : 0.0;
  return std::pow(std::abs(u), p);
}

/// |u|^{p-2} u, or u_+^{p-1}.
inline double power_force(double u, double p, bool positive_part) {
  if (positive_part) return u > 0.0 ? std::pow(u, p - 1.0) : 0.0;
  double const a = std::abs(u);
  return a == 0.0 ? 0.0 : std::pow(a, p - 2.0) * u;
}

inline EnergyTerms energy_terms(RadialField const& u, RadialField const& phi, double p, bool positive_part) {
  auto const& g = u.grid();
  auto const w = quadrature_weights(g);
  EnergyTerms t;
  t.gradient = dirichlet_energy(u);
  for (std::size_t j = 1; j < g.size(); ++j) {
    double const u2 = u[j] * u[j];
    t.mass += w[j] * u2;
    t.coulomb += w[j] * u2 * phi[j];
    t.screening += w[j] * u2 * phi[j] * phi[j];
    t.power += w[j] * power_density(u[j], p, positive_part);
  }
  return t;
}

/// Strong-form residual -Delta u + a u - kappa u Phi^2 - 2 b u Phi - f(u) at a given field.
inline RadialField residual_with_field(RadialField const& u, RadialField const& phi, Coefficients const& k,
                                       bool positive_part) {
  RadialField r = laplacian_radial(u);
  for (std::size_t j = 0; j < u.size(); ++j) {
    double const f = phi[j];
    r[j] = -r[j] + k.a * u[j] - k.kappa * u[j] * f * f - 2.0 * k.b * u[j] * f - power_force(u[j], k.p, positive_part);
  }
  return r;
}

/// sqrt(<R, (-Delta + a)^{-1} R>) with the Dirichlet node pinned.
inline double dual_norm(RadialField const& residual, double a) {
  auto const& g = residual.grid();
  Tridiagonal op = negative_laplacian(g, OuterBoundary::dirichlet);
  std::size_t const n = static_cast<std::size_t>(g.n());
  for (std::size_t j = 0; j < n; ++j) op.diag[j] += a;
  std::vector<double> rhs = residual.data();
  rhs[n] = 0.0;
  RadialField z(g, solve_tridiagonal(op, std::move(rhs), "dual_norm"));
  double const s = inner(residual, z);
  return std::sqrt(std::max(s, 0.0));
}

inline EnergyReport assemble_report(EnergyTerms const& t, Coefficients const& k, bool nonrelativistic) {
  EnergyReport rep;
  rep.terms = t;
  rep.coeffs = k;
  double const p = k.p;
  rep.action = 0.5 * t.gradient + 0.5 * k.a * t.mass - 0.5 * k.b * t.coulomb - t.power / p;
  rep.nehari = t.gradient + k.a * t.mass - k.kappa * t.screening - 2.0 * k.b * t.coulomb - t.power;
  rep.pohozaev =
      0.5 * t.gradient + 1.5 * k.a * t.mass - k.kappa * t.screening - 2.5 * k.b * t.coulomb - 3.0 / p * t.power;
  if (nonrelativistic) {
    rep.scaling_derivative = 2.0 * rep.nehari - rep.pohozaev;
    rep.has_scaling_derivative = true;
  }
  return rep;
}

}  // namespace detail

/// Full report for either model given the matching field.
inline EnergyReport evaluate_energy(RadialField const& u, RadialField const& phi, Params const& prm,
                                    bool positive_part) {
  Coefficients const k = coefficients(prm);
  EnergyReport rep = detail::assemble_report(detail::energy_terms(u, phi, prm.p, positive_part), k,
                                             prm.nonrelativistic());
  rep.gradient_norm = detail::dual_norm(detail::residual_with_field(u, phi, k, positive_part), k.a);
  return rep;
}

inline EnergyReport evaluate_energy(RadialField const& u, Params const& prm, bool positive_part) {
  return evaluate_energy(u, solve_field(u, prm).phi, prm, positive_part);
}

/// I_inf (or the modified functional with u_+), J_inf, P_inf and G_inf = 2 J_inf - P_inf.
inline EnergyReport action_nsp(RadialField const& u, Params const& prm, bool positive_part = false) {
  if (!prm.nonrelativistic()) throw Error(ErrorKind::configuration, "action_nsp", "requires c = infinity");
  require_admissible(prm, "action_nsp");
  return evaluate_energy(u, solve_phi_infty(u, prm).phi, prm, positive_part);
}

/// I_c (or the modified functional), J_c and P_c.
inline EnergyReport action_nmkg(RadialField const& u, Params const& prm, bool positive_part = false) {
  if (prm.nonrelativistic()) throw Error(ErrorKind::configuration, "action_nmkg", "requires finite c");
  require_admissible(prm, "action_nmkg");
  return evaluate_energy(u, solve_phi_c(u, prm).phi, prm, positive_part);
}

/// -Delta u + 2 m mu u - 2 q m u phi_u - |u|^{p-2} u.
inline RadialField gradient_nsp(RadialField const& u, Params const& prm, bool positive_part = false) {
  if (!prm.nonrelativistic()) throw Error(ErrorKind::configuration, "gradient_nsp", "requires c = infinity");
  require_admissible(prm, "gradient_nsp");
  return detail::residual_with_field(u, solve_phi_infty(u, prm).phi, coefficients(prm), positive_part);
}

/// -Delta u + (2 m mu - mu^2/c^2) u - (q/c)^2 u Phi_u^2 - 2 q (m - mu/c^2) u Phi_u - |u|^{p-2} u.
inline RadialField gradient_nmkg(RadialField const& u, Params const& prm, bool positive_part = false) {
  if (prm.nonrelativistic()) throw Error(ErrorKind::configuration, "gradient_nmkg", "requires finite c");
  require_admissible(prm, "gradient_nmkg");
  return detail::residual_with_field(u, solve_phi_c(u, prm).phi, coefficients(prm), positive_part);
}

inline RadialField gradient(RadialField const& u, Params const& prm, bool positive_part = false) {
  return prm.nonrelativistic() ? gradient_nsp(u, prm, positive_part) : gradient_nmkg(u, prm, positive_part);
}

/// (5p-12)/2 I - J + (4-p)/2 P, and the closed form it reduces to:
/// int (p-3)|grad u|^2 + (p-2)/2 a u^2 + (p-2)/2 kappa u^2 Phi^2.
struct EnergyIdentity {
  double combination = 0.0;
  double closed_form = 0.0;
  /// (5p-12)/2 I alone, which equals closed_form at a critical point.
  double scaled_action = 0.0;
};

inline EnergyIdentity energy_identity(EnergyReport const& rep) {
  double const p = rep.coeffs.p;
  auto const& t = rep.terms;
  EnergyIdentity id;
  id.scaled_action = 0.5 * (5.0 * p - 12.0) * rep.action;
  id.combination = id.scaled_action - rep.nehari + 0.5 * (4.0 - p) * rep.pohozaev;
  id.closed_form = (p - 3.0) * t.gradient + 0.5 * (p - 2.0) * rep.coeffs.a * t.mass +
                   0.5 * (p - 2.0) * rep.coeffs.kappa * t.screening;
  return id;
}

/// Ground-state level expressed through the quadratic terms only (valid where J = P = 0):
/// int 2(p-3)/(5p-12) |grad U|^2 + 2(p-2)/(5p-12) m mu U^2.
inline double nsp_level_from_quadratic_terms(EnergyReport const& rep) {
  double const p = rep.coeffs.p;
  double const d = 5.0 * p - 12.0;
  return 2.0 * (p - 3.0) / d * rep.terms.gradient + (p - 2.0) / d * rep.coeffs.a * rep.terms.mass;
}

/// Action along the dilation path gamma(t)(x) = t^2 U0(t x).
///
/// With Phi_gamma(x) = t^2 Psi(t x), where -Delta Psi + kappa t^2 U0^2 Psi = -b U0^2, every term
/// rescales exactly:  1/2 t^3 A + a/2 t B - b/2 t^3 C(kappa t^2) - t^{2p-3}/p D.
/// For c = infinity C does not depend on t and the path energy is a closed-form polynomial.
class ScalingPath {
 public:
  ScalingPath(RadialField U0, Params const& prm) : u0_(std::move(U0)), prm_(prm), k_(coefficients(prm)) {
    auto const phi = solve_phi_infty(u0_, prm_.with_c(infinity)).phi;
    auto const t = detail::energy_terms(u0_, phi, prm_.p, true);
    A_ = t.gradient;
    B_ = t.mass;
    D_ = t.power;
    C_inf_ = t.coulomb;  // int U0^2 phi_{U0} with b = q m
  }

  double gradient_term() const noexcept { return A_; }
  double mass_term() const noexcept { return B_; }
  double coulomb_term() const noexcept { return C_inf_; }
  double power_term() const noexcept { return D_; }

  /// Modified action along the path for the model selected by params.c.
  double energy(double t) const {
    if (t < 0.0) throw Error(ErrorKind::invalid_argument, "scaling_path_energy", "requires t >= 0");
    if (t == 0.0) return 0.0;
    double const p = k_.p;
    double const t3 = t * t * t;
    double coul = C_inf_;
    if (!prm_.nonrelativistic()) {
      auto const psi = detail::solve_screened(u0_, k_.kappa * t * t, k_.b, "scaling_path_energy");
      coul = 0.0;
      auto const w = quadrature_weights(u0_.grid());
      for (std::size_t j = 1; j < u0_.size(); ++j) coul += w[j] * u0_[j] * u0_[j] * psi[j];
      return 0.5 * t3 * A_ + 0.5 * k_.a * t * B_ - 0.5 * k_.b * t3 * coul - std::pow(t, 2.0 * p - 3.0) / p * D_;
    }
    return 0.5 * t3 * A_ + 0.5 * k_.a * t * B_ - 0.5 * k_.b * t3 * coul - std::pow(t, 2.0 * p - 3.0) / p * D_;
  }

  /// d/dt of the c = infinity path energy.
  double nsp_derivative(double t) const {
    double const p = k_.p;
    double const m_mu = 0.5 * coefficients(prm_.with_c(infinity)).a;
    double const qm = prm_.q * prm_.m;
    return 1.5 * t * t * A_ + m_mu * B_ - 1.5 * qm * t * t * C_inf_ - (2.0 * p - 3.0) / p * std::pow(t, 2.0 * p - 4.0) * D_;
  }

 private:
  RadialField u0_;
  Params prm_;
  Coefficients k_;
  double A_ = 0.0, B_ = 0.0, C_inf_ = 0.0, D_ = 0.0;
};

inline double scaling_path_energy(RadialField const& U0, double t, Params const& prm) {
  if (t < 0.0) throw Error(ErrorKind::invalid_argument, "scaling_path_energy", "requires t >= 0");
  return ScalingPath(U0, prm).energy(t);
}

}  // namespace soliton
