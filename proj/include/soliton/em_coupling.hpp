#pragma once

// Reduced electrostatic fields:
//   -Delta phi = -q m u^2                              (Schrodinger-Poisson)
//   -Delta Phi + (q/c)^2 u^2 Phi = -q (m - mu/c^2) u^2  (Maxwell-Klein-Gordon)
// Both are posed on R^3; outside r_max the field is continued harmonically (A/r).

#include <algorithm>
#include <cmath>
#include <vector>

#include "soliton/params.hpp"
#include "soliton/radial_core.hpp"

namespace soliton {

struct FieldSolveResult {
  RadialField phi;
  double residual = 0.0;  // weighted L2 norm of the discrete equation
  double charge = 0.0;    // b int u^2 dx
};

namespace detail {

/// Strong-form matrix of -Delta + kappa u^2 with the monopole far-field condition.
inline Tridiagonal screened_operator(RadialField const& u, double kappa) {
  Tridiagonal t = negative_laplacian(u.grid(), OuterBoundary::monopole);
  if (kappa != 0.0)
    for (std::size_t j = 0; j < u.size(); ++j) t.diag[j] += kappa * u[j] * u[j];
  return t;
}

inline double equation_residual(RadialField const& u, RadialField const& phi, double kappa, double b) {
  Tridiagonal const op = screened_operator(u, kappa);
  std::vector<double> r = op.apply(phi.data());
  RadialField res(u.grid());
  for (std::size_t j = 0; j < r.size(); ++j) res[j] = r[j] + b * u[j] * u[j];
  return std::sqrt(inner(res, res));
}

/// Solves -Delta Phi + kappa u^2 Phi = -b u^2.
inline RadialField solve_screened(RadialField const& u, double kappa, double b, char const* operation) {
  Tridiagonal const op = screened_operator(u, kappa);
  std::vector<double> rhs(u.size());
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = -b * u[j] * u[j];
  // Thomas elimination on this M-matrix keeps signs in floating point, so Phi <= 0 holds exactly.
  std::vector<double> phi = solve_tridiagonal(op, std::move(rhs), operation);
  if (kappa > 0.0 && b > 0.0) {
    // Where Phi comes within a factor 2 of the saturation value L = -b/kappa, use instead
    // Phi = L + psi: the constant L absorbs the source and psi >= 0 is driven only by the
    // far-field row, which keeps Phi >= L exact as well.
    double const L = -b / kappa;
    if (std::any_of(phi.begin(), phi.end(), [&](double v) { return v < 0.5 * L; })) {
      Tridiagonal const lap = negative_laplacian(u.grid(), OuterBoundary::monopole);
      std::size_t const n = phi.size() - 1;
      std::vector<double> src(phi.size(), 0.0);
      src[n] = -(lap.diag[n] + lap.lower[n]) * L;
      std::vector<double> const psi = solve_tridiagonal(op, std::move(src), operation);
      for (std::size_t j = 0; j < phi.size(); ++j)
        if (phi[j] < 0.5 * L) phi[j] = L + psi[j];
    }
  }
  return RadialField(u.grid(), std::move(phi));
}

/// phi(r) = -b [ (1/r) int_0^r s^2 u^2 ds + int_r^R s u^2 ds ], cumulative trapezoid sums.
inline RadialField newtonian_potential(RadialField const& u, double b) {
  auto const& g = u.grid();
  std::size_t const n = g.size();
  double const h = g.h();
  // inner[i] = int_0^{r_i} s^2 u^2 ds, outer[i] = int_{r_i}^{R} s u^2 ds
  std::vector<double> inner_part(n, 0.0), outer_part(n, 0.0);
  auto fi = [&](std::size_t j) { return g.r(j) * g.r(j) * u[j] * u[j]; };
  auto fo = [&](std::size_t j) { return g.r(j) * u[j] * u[j]; };
  for (std::size_t j = 1; j < n; ++j) inner_part[j] = inner_part[j - 1] + 0.5 * h * (fi(j - 1) + fi(j));
  for (std::size_t j = n - 1; j-- > 0;) outer_part[j] = outer_part[j + 1] + 0.5 * h * (fo(j) + fo(j + 1));
  RadialField phi(g);
  phi[0] = -b * outer_part[0];
  for (std::size_t j = 1; j < n; ++j) phi[j] = -b * (inner_part[j] / g.r(j) + outer_part[j]);
  return phi;
}

}  // namespace detail

inline double charge(RadialField const& u, double b) {
  RadialField sq(u.grid());
  for (std::size_t j = 0; j < u.size(); ++j) sq[j] = u[j] * u[j];
  return b * integrate_r3(sq);
}

/// Closed-form Newtonian potential phi_u = -(q m / 4 pi |x|) * u^2.
inline FieldSolveResult solve_phi_infty(RadialField const& u, Params const& prm) {
  double const b = prm.q * prm.m;
  FieldSolveResult out{detail::newtonian_potential(u, b), 0.0, charge(u, b)};
  out.residual = detail::equation_residual(u, out.phi, 0.0, b);
  return out;
}

/// Screened potential by direct tridiagonal factorization.
inline FieldSolveResult solve_phi_c(RadialField const& u, Params const& prm) {
  if (prm.nonrelativistic())
    throw Error(ErrorKind::configuration, "solve_phi_c", "requires finite c (use solve_phi_infty for c = infinity)");
  require_admissible(prm, "solve_phi_c");
  Coefficients const k = coefficients(prm);
  FieldSolveResult out{detail::solve_screened(u, k.kappa, k.b, "solve_phi_c"), 0.0, charge(u, k.b)};
  out.residual = detail::equation_residual(u, out.phi, k.kappa, k.b);
  return out;
}

/// Dispatches on c: closed form for c = infinity, screened solve otherwise.
inline FieldSolveResult solve_field(RadialField const& u, Params const& prm) {
  return prm.nonrelativistic() ? solve_phi_infty(u, prm) : solve_phi_c(u, prm);
}

/// Lower end of the maximum-principle bracket -(c^2/q)(m - mu/c^2) <= Phi <= 0.
inline double field_lower_bound(Params const& prm) {
  if (prm.nonrelativistic()) return -infinity;
  return -(prm.c * prm.c / prm.q) * (prm.m - prm.mu / (prm.c * prm.c));
}

}  // namespace soliton
