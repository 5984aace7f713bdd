#pragma once

// Solitary-wave solvers: the NLS seed (shooting and preconditioned descent), Schrodinger-Poisson
// ground states and global minimizers, coupled Newton for either model, parameter continuation,
// and the one-path mountain-pass level along the dilation path.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "soliton/em_coupling.hpp"
#include "soliton/functionals.hpp"
#include "soliton/params.hpp"
#include "soliton/radial_core.hpp"
#include "soliton/tridiagonal.hpp"

namespace soliton {

struct SolverConfig {
  /// Stopping threshold on EnergyReport::gradient_norm, relative to max(1, sqrt(scale)).
  double tol_grad = 1e-9;
  int max_iter = 4000;
  /// Initial step of the preconditioned descent.
  double damping = 0.5;
  /// Relative residual threshold of newton_coupled.
  double newton_tol = 1e-10;
  int newton_max_iter = 40;
  /// Descent hands over to Newton below this relative gradient norm, or once the action stalls.
  double newton_switch = 1e-3;
  /// Upper bound on accepted continuation steps per branch.
  int continuation_steps = 400;
  double min_step = 1e-8;
  /// Shooting integrator step bound.
  double ode_step = 5e-4;
};

struct ShootingDiagnostics {
  double u0 = 0.0;
  double cutoff_radius = 0.0;
  int bisections = 0;
  /// J and P evaluated by Simpson quadrature along the ODE trajectory (exact u').
  double nehari = 0.0;
  double pohozaev = 0.0;
  double scale = 0.0;
};

struct SolveReport {
  RadialField u;
  RadialField phi;
  Params params;
  EnergyReport energy;
  int iterations = 0;
  bool converged = false;
  bool positivity = false;
  std::optional<ShootingDiagnostics> shooting;

  double relative_gradient_norm() const {
    return energy.gradient_norm / std::max(1.0, std::sqrt(energy.scale()));
  }
};

struct BranchPoint {
  double value;
  SolveReport report;
};

struct Branch {
  std::string parameter_name;  // "c" or "q"
  std::vector<BranchPoint> points;
  bool truncated = false;
  double failed_value = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

struct BranchSpec {
  std::string parameter;       // "c" (stepped in 1/c^2) or "q"
  std::vector<double> targets;  // recorded parameter values, monotone away from the seed
};

struct MountainPass {
  double t0 = 0.0;
  double e_hat = 0.0;
  double t_argmax = 0.0;
};

inline bool all_finite(RadialField const& u) {
  for (double v : u.values())
    if (!std::isfinite(v)) return false;
  return true;
}

inline bool is_positive(RadialField const& u) {
  double linf = 0.0;
  for (double v : u.values()) linf = std::max(linf, std::abs(v));
  for (double v : u.values())
    if (v < -1e-10 * linf) return false;
  return true;
}

namespace detail {

inline bool nonrelativistic(Coefficients const& k) { return k.kappa == 0.0; }

inline RadialField field_for(RadialField const& u, Coefficients const& k, char const* op) {
  if (k.kappa == 0.0) return newtonian_potential(u, k.b);
  return solve_screened(u, k.kappa, k.b, op);
}

inline EnergyReport report_for(RadialField const& u, RadialField const& phi, Coefficients const& k,
                               bool positive_part) {
  EnergyReport rep = assemble_report(energy_terms(u, phi, k.p, positive_part), k, nonrelativistic(k));
  rep.gradient_norm = dual_norm(residual_with_field(u, phi, k, positive_part), k.a);
  return rep;
}

inline double relative_gradient(EnergyReport const& rep) {
  return rep.gradient_norm / std::max(1.0, std::sqrt(rep.scale()));
}

/// The centre node carries no quadrature weight, so descent leaves it to the even extrapolation
/// u(0) = (4 u_1 - u_2) / 3 instead of its own (unstable) stencil equation.
inline RadialField with_even_center(RadialField u) {
  u[0] = (4.0 * u[1] - u[2]) / 3.0;
  return u;
}

/// (-Delta + a)^{-1} r with the outer node pinned.
inline RadialField precondition(RadialField const& r, double a) {
  auto const& g = r.grid();
  std::size_t const n = static_cast<std::size_t>(g.n());
  Tridiagonal op = negative_laplacian(g, OuterBoundary::dirichlet);
  for (std::size_t j = 0; j < n; ++j) op.diag[j] += a;
  std::vector<double> rhs = r.data();
  rhs[n] = 0.0;
  return RadialField(g, solve_tridiagonal(op, std::move(rhs), "precondition"));
}

inline SolveReport make_report(RadialField u, Coefficients const& k, Params const& prm, int iterations,
                               bool converged, bool positive_part = false) {
  RadialField phi = field_for(u, k, "make_report");
  EnergyReport rep = report_for(u, phi, k, positive_part);
  bool const pos = is_positive(u);
  return SolveReport{std::move(u), std::move(phi), prm, rep, iterations, converged, pos, std::nullopt};
}

inline double h1_sq(RadialField const& u) {
  double const n = norms(u).H1;
  return n * n;
}

// ---------------------------------------------------------------------------------------------
// Shooting for -Delta u + lambda u - |u|^{p-2} u = 0.

struct Trajectory {
  std::vector<double> u;
  std::vector<double> v;
  double step = 0.0;
  enum class Outcome { overshoot, undershoot, undecided } outcome = Outcome::undecided;
  std::size_t event_index = 0;
};

inline Trajectory shoot(double u0, double lambda, double p, double step, double r_end, bool record) {
  auto force = [&](double u) { return lambda * u - (u == 0.0 ? 0.0 : std::pow(std::abs(u), p - 2.0) * u); };
  auto rhs = [&](double r, double u, double v, double& du, double& dv) {
    du = v;
    dv = r == 0.0 ? force(u) / 3.0 : force(u) - 2.0 * v / r;
  };
  Trajectory tr;
  tr.step = step;
  double u = u0, v = 0.0, r = 0.0;
  if (record) {
    tr.u.push_back(u);
    tr.v.push_back(v);
  }
  std::size_t const steps = static_cast<std::size_t>(std::ceil(r_end / step));
  for (std::size_t i = 1; i <= steps; ++i) {
    double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    rhs(r, u, v, k1u, k1v);
    rhs(r + 0.5 * step, u + 0.5 * step * k1u, v + 0.5 * step * k1v, k2u, k2v);
    rhs(r + 0.5 * step, u + 0.5 * step * k2u, v + 0.5 * step * k2v, k3u, k3v);
    rhs(r + step, u + step * k3u, v + step * k3v, k4u, k4v);
    u += step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    r = static_cast<double>(i) * step;
    if (record) {
      tr.u.push_back(u);
      tr.v.push_back(v);
    }
    if (u < 0.0) {
      tr.outcome = Trajectory::Outcome::overshoot;
      tr.event_index = i;
      return tr;
    }
    if (v > 0.0) {
      tr.outcome = Trajectory::Outcome::undershoot;
      tr.event_index = i;
      return tr;
    }
  }
  tr.event_index = steps;
  return tr;
}

inline double simpson(std::vector<double> const& f, std::size_t count, double h) {
  // Simpson on an even number of intervals, trapezoid on a leftover interval.
  if (count < 2) return 0.0;
  std::size_t intervals = count - 1;
  std::size_t even = intervals - intervals % 2;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2) s += f[i] + 4.0 * f[i + 1] + f[i + 2];
  s *= h / 3.0;
  if (even < intervals) s += 0.5 * h * (f[even] + f[even + 1]);
  return s;
}

}  // namespace detail

struct ShootingResult {
  RadialField profile;
  ShootingDiagnostics diagnostics;
};

/// Positive radial ground state of -Delta u + lambda u = |u|^{p-2} u by bisection on u(0),
/// sampled on the grid with a matched exponential tail u ~ A e^{-sqrt(lambda) r} / r.
inline ShootingResult shoot_nls_ground(double lambda, double p, RadialGrid const& grid, SolverConfig const& cfg) {
  char const* op = "solve_nls_ground";
  if (!(p > 2.0 && p < 6.0)) throw Error(ErrorKind::configuration, op, "requires 2 < p < 6");
  if (!(lambda > 0.0)) throw Error(ErrorKind::configuration, op, "requires 2 m mu > 0");
  int const sub = std::max(1, static_cast<int>(std::ceil(grid.h() / cfg.ode_step)));
  double const step = grid.h() / sub;
  double const k = std::sqrt(lambda);
  double const r_end = std::max(grid.r_max(), 60.0 / k);

  // u(0) must exceed the zero of F(u) = u^p/p - lambda u^2/2.
  double lo = std::pow(0.5 * p * lambda, 1.0 / (p - 2.0));
  double hi = 2.0 * lo;
  int guard = 0;
  while (detail::shoot(hi, lambda, p, step, r_end, false).outcome != detail::Trajectory::Outcome::overshoot) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw Error(ErrorKind::non_convergence, op, "failed to bracket u(0)");
  }
  int bisections = 0;
  while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi) {
    double const mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::shoot(mid, lambda, p, step, r_end, false).outcome == detail::Trajectory::Outcome::overshoot)
      hi = mid;
    else
      lo = mid;
    if (++bisections > cfg.max_iter) throw Error(ErrorKind::non_convergence, op, "bisection did not converge");
  }

  auto tr = detail::shoot(lo, lambda, p, step, r_end, true);
  std::size_t last = tr.u.size() - 1;
  // Keep the trajectory where it stays well above the parasitic growing mode.
  std::size_t cut = last;
  if (tr.outcome == detail::Trajectory::Outcome::undershoot) {
    double const umin = tr.u[last];
    while (cut > 0 && tr.u[cut] < 1e3 * umin) --cut;
  }
  double const r_cut = static_cast<double>(cut) * step;
  double const u_cut = tr.u[cut];

  ShootingResult out{RadialField(grid), {}};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::size_t const idx = j * static_cast<std::size_t>(sub);
    double const r = grid.r(j);
    out.profile[j] = idx <= cut ? tr.u[idx] : u_cut * (r_cut / r) * std::exp(-k * (r - r_cut));
  }
  out.profile[grid.size() - 1] = 0.0;

  std::vector<double> grad(cut + 1), mass(cut + 1), pw(cut + 1);
  for (std::size_t i = 0; i <= cut; ++i) {
    double const r = static_cast<double>(i) * step;
    double const w = four_pi * r * r;
    grad[i] = w * tr.v[i] * tr.v[i];
    mass[i] = w * tr.u[i] * tr.u[i];
    pw[i] = w * std::pow(std::abs(tr.u[i]), p);
  }
  double const G = detail::simpson(grad, cut + 1, step);
  double const M = detail::simpson(mass, cut + 1, step);
  double const N = detail::simpson(pw, cut + 1, step);
  auto& d = out.diagnostics;
  d.u0 = lo;
  d.cutoff_radius = r_cut;
  d.bisections = bisections;
  d.nehari = G + lambda * M - N;
  d.pohozaev = 0.5 * G + 1.5 * lambda * M - 3.0 / p * N;
  d.scale = G + lambda * M;
  return out;
}

/// NLS coefficients (q = 0) for the given mass and frequency.
inline Coefficients nls_coefficients(Params const& prm) { return {2.0 * prm.m * prm.mu, 0.0, 0.0, prm.p}; }

namespace detail {

/// Coupled Newton on (u, Phi) with block-tridiagonal Jacobian. Returns iterations and the final
/// relative residual; throws on singular Jacobian or divergence.
struct NewtonOutcome {
  RadialField u;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

inline NewtonOutcome newton_solve(RadialField u, Coefficients const& k, SolverConfig const& cfg) {
  char const* op = "newton_coupled";
  auto const& g = u.grid();
  std::size_t const n = static_cast<std::size_t>(g.n());
  std::size_t const size = g.size();
  Tridiagonal const lap_u = negative_laplacian(g, OuterBoundary::dirichlet);
  Tridiagonal const lap_phi = negative_laplacian(g, OuterBoundary::monopole);
  u[n] = 0.0;
  RadialField phi = field_for(u, k, op);

  auto residuals = [&](RadialField const& uu, RadialField const& ff, std::vector<Vec2>& F) {
    std::vector<double> lu = lap_u.apply(uu.data());
    std::vector<double> lf = lap_phi.apply(ff.data());
    F.assign(size, Vec2{0.0, 0.0});
    for (std::size_t j = 0; j < size; ++j) {
      double const x = uu[j], f = ff[j];
      F[j][0] = j == n ? x : lu[j] + k.a * x - k.kappa * x * f * f - 2.0 * k.b * x * f - power_force(x, k.p, false);
      F[j][1] = lf[j] + k.kappa * x * x * f + k.b * x * x;
    }
  };
  // Residual norms relative to the size of the operator terms at the seed; the normalization
  // stays fixed so that the Newton direction is a descent direction for the merit function.
  double scale1 = 0.0, scale2 = 0.0;
  {
    RadialField s1(g), s2(g);
    std::vector<double> const lu = lap_u.apply(u.data());
    for (std::size_t j = 0; j < size; ++j) {
      s1[j] = j == n ? 0.0 : std::abs(lu[j]) + k.a * std::abs(u[j]);
      s2[j] = k.b * u[j] * u[j];
    }
    scale1 = std::max(std::sqrt(inner(s1, s1)), 1e-300);
    scale2 = std::sqrt(inner(s2, s2));
  }
  double const center_weight = four_pi / 3.0 * std::pow(0.5 * g.h(), 3);
  auto measure = [&](RadialField const&, std::vector<Vec2> const& F) {
    RadialField f1(g), f2(g);
    for (std::size_t j = 0; j < size; ++j) {
      f1[j] = j == n ? 0.0 : F[j][0];
      f2[j] = F[j][1];
    }
    // inner() gives the centre node no weight; its equation is counted with the half-cell ball.
    double const n1 = inner(f1, f1) + center_weight * f1[0] * f1[0];
    double const n2 = inner(f2, f2) + center_weight * f2[0] * f2[0];
    double const r1 = std::sqrt(n1) / scale1;
    double const r2 = scale2 > 0.0 ? std::sqrt(n2) / scale2 : std::sqrt(n2);
    return std::max(r1, r2);
  };

  std::vector<Vec2> F;
  residuals(u, phi, F);
  double res = measure(u, F);
  NewtonOutcome out{u, 0, res, false};
  int growth = 0;
  for (int it = 1; it <= cfg.newton_max_iter; ++it) {
    BlockTridiagonal J(size);
    for (std::size_t j = 0; j < size; ++j) {
      double const x = u[j], f = phi[j];
      if (j == n) {
        J.diag[j] = {1.0, 0.0, 0.0, 0.0};
      } else {
        double const dforce = (k.p - 1.0) * (x == 0.0 ? 0.0 : std::pow(std::abs(x), k.p - 2.0));
        J.diag[j][0] = lap_u.diag[j] + k.a - k.kappa * f * f - 2.0 * k.b * f - dforce;
        J.diag[j][1] = -2.0 * k.kappa * x * f - 2.0 * k.b * x;
        if (j > 0) J.lower[j][0] = lap_u.lower[j];
        J.upper[j][0] = lap_u.upper[j];
      }
      J.diag[j][2] = 2.0 * k.kappa * x * f + 2.0 * k.b * x;
      J.diag[j][3] = lap_phi.diag[j] + k.kappa * x * x;
      if (j > 0) J.lower[j][3] = lap_phi.lower[j];
      if (j < n) J.upper[j][3] = lap_phi.upper[j];
    }
    if (k.kappa == 0.0 && k.b == 0.0) {
      // Decoupled field equation keeps the pivot blocks invertible.
      for (std::size_t j = 0; j < size; ++j) J.diag[j][2] = 0.0;
    }
    std::vector<Vec2> rhs(size);
    for (std::size_t j = 0; j < size; ++j) rhs[j] = {-F[j][0], -F[j][1]};
    std::vector<Vec2> const delta = solve_block_tridiagonal(J, std::move(rhs), op);

    double lambda = 1.0;
    RadialField u_new(g), phi_new(g);
    std::vector<Vec2> F_new;
    double res_new = 0.0;
    for (int ls = 0; ls < 12; ++ls) {
      for (std::size_t j = 0; j < size; ++j) {
        u_new[j] = u[j] + lambda * delta[j][0];
        phi_new[j] = phi[j] + lambda * delta[j][1];
      }
      residuals(u_new, phi_new, F_new);
      res_new = measure(u_new, F_new);
      if (std::isfinite(res_new) && (res_new < res || res_new <= cfg.newton_tol)) break;
      lambda *= 0.5;
    }
    if (!std::isfinite(res_new)) throw Error(ErrorKind::divergence, op, "non-finite residual");
    growth = res_new > res ? growth + 1 : 0;
    if (growth >= 5) throw Error(ErrorKind::divergence, op, "residual grew for 5 consecutive steps");
    double step_size = 0.0, u_size = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      step_size = std::max(step_size, std::abs(lambda * delta[j][0]));
      u_size = std::max(u_size, std::abs(u_new[j]));
    }
    u = u_new;
    phi = phi_new;
    F = F_new;
    res = res_new;
    out.iterations = it;
    if (res <= cfg.newton_tol || (step_size <= 1e-14 * u_size && res <= 1e3 * cfg.newton_tol)) {
      out.converged = true;
      break;
    }
  }
  out.u = u;
  out.residual = res;
  return out;
}

}  // namespace detail

/// Newton iteration on the coupled (u, Phi) system for either model (c = infinity allowed).
inline SolveReport newton_coupled(RadialField const& seed_u, Params const& prm, SolverConfig const& cfg) {
  require_admissible(prm, "newton_coupled");
  Coefficients const k = coefficients(prm);
  auto out = detail::newton_solve(seed_u, k, cfg);
  if (!out.converged)
    throw Error(ErrorKind::non_convergence, "newton_coupled",
                "residual " + format_number(out.residual) + " after " + std::to_string(out.iterations) + " steps");
  return detail::make_report(std::move(out.u), k, prm, out.iterations, true);
}

namespace detail {

/// Preconditioned descent with Nehari rescaling for the q = 0 problem.
inline SolveReport descend_nls(RadialField u, Coefficients const& k, Params const& prm, SolverConfig const& cfg) {
  char const* op = "descend_nls_ground";
  auto const zero = RadialField(u.grid());
  auto rescale = [&](RadialField& x) {
    auto const t = energy_terms(x, zero, k.p, true);
    if (!(t.power > 0.0)) throw Error(ErrorKind::projection_failure, op, "no positive part to rescale");
    double const s = std::pow((t.gradient + k.a * t.mass) / t.power, 1.0 / (k.p - 2.0));
    x *= s;
  };
  std::size_t const n = static_cast<std::size_t>(u.grid().n());
  u[n] = 0.0;
  rescale(u);
  double tau = cfg.damping;
  EnergyReport rep = report_for(u, zero, k, true);
  int it = 0;
  bool underflow = false;
  for (; it < cfg.max_iter && !underflow; ++it) {
    if (relative_gradient(rep) <= cfg.tol_grad) break;
    RadialField const d = precondition(residual_with_field(u, zero, k, true), k.a);
    for (;;) {
      RadialField trial(u.grid());
      std::optional<EnergyReport> trep;
      try {
        trial = with_even_center(u - tau * d);
        rescale(trial);
        if (all_finite(trial)) trep = report_for(trial, zero, k, true);
      } catch (Error const&) {
      }
      if (trep && trep->action <= rep.action + 1e-14 * std::abs(rep.action)) {
        u = std::move(trial);
        rep = *trep;
        tau = std::min(1.0, 1.5 * tau);
        break;
      }
      tau *= 0.5;
      if (tau < 1e-12) {
        underflow = true;  // at the round-off floor of the action; reported as not converged
        break;
      }
    }
  }
  bool const converged = relative_gradient(rep) <= cfg.tol_grad;
  RadialField phi = zero;
  return SolveReport{u, phi, prm, report_for(u, phi, k, false), it, converged, is_positive(u), std::nullopt};
}

}  // namespace detail

/// H^1-preconditioned descent with Nehari rescaling for -Delta u + 2 m mu u = |u|^{p-2} u.
/// Independent of the shooting solver; used as its cross-check.
inline SolveReport descend_nls_ground(Params const& prm, RadialGrid const& grid, SolverConfig const& cfg) {
  if (!(prm.p > 2.0 && prm.p < 6.0)) throw Error(ErrorKind::configuration, "descend_nls_ground", "requires 2 < p < 6");
  Coefficients const k = nls_coefficients(prm);
  double const width = 1.0 / std::sqrt(k.a);
  RadialField seed = RadialField::sample(grid, [&](double r) { return std::exp(-r * r / (4.0 * width * width)); });
  return detail::descend_nls(std::move(seed), k, prm, cfg);
}

/// NLS ground state w0: shooting, then Newton polish on the grid. The shooting profile and its
/// trajectory-quadrature identities are kept in the report's diagnostics.
inline SolveReport solve_nls_ground(Params const& prm, RadialGrid const& grid, SolverConfig const& cfg) {
  if (!(prm.m > 0.0 && prm.mu > 0.0)) throw Error(ErrorKind::configuration, "solve_nls_ground", "requires m, mu > 0");
  Coefficients const k = nls_coefficients(prm);
  ShootingResult shot = shoot_nls_ground(k.a, prm.p, grid, cfg);
  auto polish = [&](RadialField const& seed) -> std::optional<detail::NewtonOutcome> {
    try {
      auto out = detail::newton_solve(seed, k, cfg);
      if (out.converged && is_positive(out.u)) return out;
    } catch (Error const&) {
    }
    return std::nullopt;
  };
  auto polished = polish(shot.profile);
  if (!polished) polished = polish(detail::descend_nls(shot.profile, k, prm, cfg).u);
  if (!polished)
    throw Error(ErrorKind::non_convergence, "solve_nls_ground",
                "grid polish of the shooting profile failed (is the profile resolved by the grid?)");
  Params nls = prm;
  nls.q = 0.0;
  nls.c = infinity;
  SolveReport rep = detail::make_report(std::move(polished->u), k, nls, shot.diagnostics.bisections, true);
  rep.shooting = shot.diagnostics;
  return rep;
}

/// The shooting profile itself (continuum solution sampled on the grid).
inline RadialField nls_shooting_profile(Params const& prm, RadialGrid const& grid, SolverConfig const& cfg) {
  return shoot_nls_ground(2.0 * prm.m * prm.mu, prm.p, grid, cfg).profile;
}

struct Projection {
  double t_star = 1.0;
  RadialField projected;
};

namespace detail {

/// Root of the dilation-path derivative, then an amplitude correction on the grid so that
/// G_inf = 0 holds for the interpolated field.
inline Projection project_nsp(RadialField const& u, Coefficients const& k) {
  char const* op = "project_nehari_pohozaev";
  double const p = k.p;
  double const m_mu = 0.5 * k.a;
  auto terms_of = [&](RadialField const& x) { return energy_terms(x, newtonian_potential(x, k.b), p, true); };
  auto const t = terms_of(u);
  if (!(t.power > 0.0)) throw Error(ErrorKind::projection_failure, op, "int u_+^p = 0, nothing balances the quadratic terms");
  auto g = [&](double s) {
    return 1.5 * s * s * t.gradient + m_mu * t.mass - 1.5 * k.b * s * s * t.coulomb -
           (2.0 * p - 3.0) / p * std::pow(s, 2.0 * p - 4.0) * t.power;
  };
  double lo = 1e-6, hi = 1.0;
  if (!(g(lo) > 0.0)) throw Error(ErrorKind::projection_failure, op, "no sign change of the path derivative");
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorKind::projection_failure, op, "no sign change in t in [1e-6, 1e6]");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    double const mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  double const ts = 0.5 * (lo + hi);
  RadialField x = std::abs(ts - 1.0) < 1e-15 ? u : dilate(u, ts, ts * ts);
  x[x.size() - 1] = 0.0;
  // Amplitude correction: G(s x) = s^2 (3/2 A + m mu B) - 3/2 b s^4 C - (2p-3)/p s^p D = 0.
  auto const tx = terms_of(x);
  double const quad = 1.5 * tx.gradient + m_mu * tx.mass;
  double const quart = -1.5 * k.b * tx.coulomb;
  double const pw = (2.0 * p - 3.0) / p * tx.power;
  auto G = [&](double s) { return s * s * quad + std::pow(s, 4.0) * quart - std::pow(s, p) * pw; };
  auto dG = [&](double s) { return 2.0 * s * quad + 4.0 * std::pow(s, 3.0) * quart - p * std::pow(s, p - 1.0) * pw; };
  double s = 1.0;
  for (int i = 0; i < 50; ++i) {
    double const step = G(s) / dG(s);
    s -= step;
    if (!(s > 0.0) || !std::isfinite(s))
      throw Error(ErrorKind::projection_failure, op, "amplitude correction left the positive cone");
    if (std::abs(step) < 1e-15 * s) break;
  }
  x *= s;
  return {ts * std::sqrt(s), std::move(x)};
}

}  // namespace detail

/// Projection onto M_inf = {G_inf = 0} along the dilation path t^2 u(t .). 3 < p < 6.
inline Projection project_nehari_pohozaev(RadialField const& u, Params const& prm) {
  if (!prm.nonrelativistic())
    throw Error(ErrorKind::configuration, "project_nehari_pohozaev", "requires c = infinity");
  require_admissible(prm, "project_nehari_pohozaev");
  if (!(prm.p > 3.0)) throw Error(ErrorKind::configuration, "project_nehari_pohozaev", "requires 3 < p < 6");
  return detail::project_nsp(u, coefficients(prm));
}

namespace detail {

inline void check_not_collapsed(RadialField const& u, char const* op) {
  if (norms(u).H1 < 1e-8) throw Error(ErrorKind::collapse_to_zero, op, "||u||_H1 < 1e-8");
}

/// Descent on M_inf followed by Newton polish.
inline SolveReport minimize_on_manifold(RadialField seed, Params const& prm, SolverConfig const& cfg) {
  char const* op = "minimize_nsp_ground";
  Coefficients const k = coefficients(prm);
  RadialField u = project_nsp(seed, k).projected;
  auto eval = [&](RadialField const& x) { return report_for(x, newtonian_potential(x, k.b), k, true); };
  EnergyReport rep = eval(u);
  double tau = cfg.damping;
  bool stalled = false;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    check_not_collapsed(u, op);
    double const rel = relative_gradient(rep);
    if (rel <= cfg.tol_grad) break;
    if (rel <= cfg.newton_switch || stalled) {
      try {
        auto polished = newton_solve(u, k, cfg);
        if (polished.converged && is_positive(polished.u)) {
          auto out = make_report(std::move(polished.u), k, prm, it + polished.iterations, false);
          if (out.energy.action <= rep.action + 1e-8 * std::abs(rep.action) &&
              relative_gradient(out.energy) <= cfg.tol_grad) {
            check_not_collapsed(out.u, op);
            out.converged = true;
            return out;
          }
        }
      } catch (Error const&) {
      }
    }
    RadialField const d = precondition(residual_with_field(u, newtonian_potential(u, k.b), k, true), k.a);
    for (;;) {
      RadialField trial(u.grid());
      std::optional<EnergyReport> trep;
      try {
        // A small step moves along the manifold; a projection that needs a large dilation means
        // the step left the region where the bounded grid represents M_inf faithfully.
        auto proj = project_nsp(with_even_center(u - tau * d), k);
        trial = std::move(proj.projected);
        if (proj.t_star > 0.5 && proj.t_star < 2.0 && all_finite(trial)) trep = eval(trial);
      } catch (Error const&) {
      }
      if (trep && trep->action <= rep.action + 1e-14 * std::abs(rep.action)) {
        stalled = rep.action - trep->action <= 1e-12 * std::abs(rep.action);
        u = std::move(trial);
        rep = *trep;
        tau = std::min(1.0, 1.5 * tau);
        break;
      }
      tau *= 0.5;
      if (tau < 1e-12) throw Error(ErrorKind::non_convergence, op, "step size underflow");
    }
  }
  check_not_collapsed(u, op);
  auto out = make_report(std::move(u), k, prm, it, false);
  out.converged = relative_gradient(out.energy) <= cfg.tol_grad;
  if (!out.converged) throw Error(ErrorKind::non_convergence, op, "max_iter reached");
  return out;
}

}  // namespace detail

/// Ground state for 3 < p < 6: minimizes the modified action over M_inf from the NLS seed.
inline SolveReport minimize_nsp_ground(Params const& prm, RadialGrid const& grid, SolverConfig const& cfg) {
  char const* op = "minimize_nsp_ground";
  if (!prm.nonrelativistic()) throw Error(ErrorKind::configuration, op, "requires c = infinity");
  require_admissible(prm, op);
  if (!(prm.p > 3.0)) throw Error(ErrorKind::configuration, op, "requires 3 < p < 6");
  SolveReport const w0 = solve_nls_ground(prm, grid, cfg);
  return detail::minimize_on_manifold(w0.u, prm, cfg);
}

/// Same minimization from a caller-supplied positive seed.
inline SolveReport minimize_nsp_ground_from(RadialField const& seed, Params const& prm, SolverConfig const& cfg) {
  char const* op = "minimize_nsp_ground";
  if (!prm.nonrelativistic()) throw Error(ErrorKind::configuration, op, "requires c = infinity");
  require_admissible(prm, op);
  if (!(prm.p > 3.0)) throw Error(ErrorKind::configuration, op, "requires 3 < p < 6");
  return detail::minimize_on_manifold(seed, prm, cfg);
}

/// Large-amplitude broad seed for the global minimizer (2 < p < 3): a smoothed plateau well above
/// the level where the local energy density m mu u^2 - u^p/p turns negative.
inline RadialField global_minimizer_seed(Params const& prm, RadialGrid const& grid) {
  double const level = std::pow(prm.p * prm.m * prm.mu, 1.0 / (prm.p - 2.0));
  double const radius = std::clamp(0.1 / prm.q, 1.0, grid.r_max() / 4.0);
  return RadialField::sample(grid, [&](double r) {
    if (r >= grid.r_max()) return 0.0;
    return 3.2 * level / (1.0 + std::exp(2.0 * (r - radius)));
  });
}

/// Global minimizer of the modified action for 2 < p < 3 by unconstrained preconditioned descent.
inline SolveReport minimize_nsp_global(Params const& prm, RadialGrid const& grid, SolverConfig const& cfg,
                                       std::optional<RadialField> seed = std::nullopt) {
  char const* op = "minimize_nsp_global";
  if (!prm.nonrelativistic()) throw Error(ErrorKind::configuration, op, "requires c = infinity");
  require_admissible(prm, op);
  if (!(prm.p < 3.0)) throw Error(ErrorKind::configuration, op, "requires 2 < p < 3");
  Coefficients const k = coefficients(prm);
  RadialField u = seed ? *seed : global_minimizer_seed(prm, grid);
  u[u.size() - 1] = 0.0;
  auto eval = [&](RadialField const& x) { return detail::report_for(x, detail::newtonian_potential(x, k.b), k, true); };
  EnergyReport rep = eval(u);
  double tau = cfg.damping;
  bool stalled = false;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    detail::check_not_collapsed(u, op);
    double const rel = detail::relative_gradient(rep);
    if (rel <= cfg.tol_grad) break;
    if ((rel <= cfg.newton_switch || stalled) && rep.action < 0.0) {
      try {
        auto polished = detail::newton_solve(u, k, cfg);
        if (polished.converged && is_positive(polished.u)) {
          auto out = detail::make_report(std::move(polished.u), k, prm, it + polished.iterations, false);
          if (std::abs(out.energy.action - rep.action) <= 1e-6 * std::abs(rep.action) &&
              detail::relative_gradient(out.energy) <= cfg.tol_grad) {
            out.converged = true;
            return out;
          }
        }
      } catch (Error const&) {
      }
    }
    RadialField const d =
        detail::precondition(detail::residual_with_field(u, detail::newtonian_potential(u, k.b), k, true), k.a);
    for (;;) {
      RadialField trial(u.grid());
      std::optional<EnergyReport> trep;
      try {
        trial = detail::with_even_center(u - tau * d);
        if (all_finite(trial)) trep = eval(trial);
      } catch (Error const&) {
      }
      if (trep && trep->action <= rep.action + 1e-14 * std::abs(rep.action)) {
        stalled = rep.action - trep->action <= 1e-12 * std::abs(rep.action);
        u = std::move(trial);
        rep = *trep;
        tau = std::min(1.0, 1.5 * tau);
        break;
      }
      tau *= 0.5;
      if (tau < 1e-12) throw Error(ErrorKind::non_convergence, op, "step size underflow");
    }
  }
  detail::check_not_collapsed(u, op);
  auto out = detail::make_report(std::move(u), k, prm, it, false);
  out.converged = detail::relative_gradient(out.energy) <= cfg.tol_grad;
  if (!out.converged) throw Error(ErrorKind::non_convergence, op, "max_iter reached");
  return out;
}

/// Warm-started sweep in c (coordinate 1/c^2) or q. Stops at the first failure and returns the
/// converged prefix with the failing parameter recorded.
inline Branch continuation(BranchSpec const& spec, Params const& params0, SolveReport const& seed,
                           SolverConfig const& cfg) {
  char const* op = "continuation";
  bool const by_c = spec.parameter == "c";
  if (!by_c && spec.parameter != "q")
    throw Error(ErrorKind::invalid_argument, op, "branch parameter must be 'c' or 'q'");
  auto coord = [&](double v) { return by_c ? (std::isinf(v) ? 0.0 : 1.0 / (v * v)) : v; };
  auto value = [&](double s) { return by_c ? (s == 0.0 ? infinity : 1.0 / std::sqrt(s)) : s; };
  auto params_at = [&](double s) { return by_c ? params0.with_c(value(s)) : params0.with_q(value(s)); };

  Branch br;
  br.parameter_name = spec.parameter;
  double s = coord(by_c ? params0.c : params0.q);
  br.points.push_back({value(s), seed});
  RadialField u = seed.u;
  RadialField u_prev = seed.u;
  double s_prev = s;
  bool have_prev = false;
  double ds_trial = 0.0;
  int accepted = 0;

  for (double target_value : spec.targets) {
    double const target = coord(target_value);
    if (target == s) continue;
    double const dir = target > s ? 1.0 : -1.0;
    if (ds_trial == 0.0) ds_trial = std::abs(target - s);
    while (s != target) {
      double const remaining = std::abs(target - s);
      double const ds = std::min(ds_trial, remaining);
      double const s_next = ds == remaining ? target : s + dir * ds;
      RadialField guess = u;
      if (have_prev && s != s_prev) {
        double const w = (s_next - s) / (s - s_prev);
        guess = u + w * (u - u_prev);
      }
      try {
        Params const prm = params_at(s_next);
        require_admissible(prm, op);
        auto res = detail::newton_solve(guess, coefficients(prm), cfg);
        if (!res.converged || !is_positive(res.u) || norms(res.u).H1 < 1e-8)
          throw Error(ErrorKind::non_convergence, op, "step rejected");
        u_prev = u;
        s_prev = s;
        have_prev = true;
        u = res.u;
        s = s_next;
        ds_trial *= 2.0;
        if (s == target) {
          auto rep = detail::make_report(u, coefficients(prm), prm, res.iterations, true);
          br.points.push_back({target_value, std::move(rep)});
        }
        if (++accepted > cfg.continuation_steps)
          throw Error(ErrorKind::non_convergence, op, "continuation step budget exhausted");
      } catch (Error const& e) {
        ds_trial *= 0.5;
        double const floor = by_c ? cfg.min_step : cfg.min_step * std::max(1.0, std::abs(target));
        if (ds_trial < floor || e.kind() == ErrorKind::configuration ||
            std::string(e.what()).find("budget") != std::string::npos) {
          br.truncated = true;
          br.failed_value = value(s + dir * std::min(2.0 * ds_trial, remaining));
          br.message = e.what();
          return br;
        }
      }
    }
  }
  return br;
}

/// One-path mountain-pass level max_{t in [0, t0]} of the modified action along t^2 U0(t .).
inline MountainPass mountain_pass_level(SolveReport const& U0, Params const& prm, int samples = 400) {
  char const* op = "mountain_pass_level";
  require_admissible(prm, op);
  if (!(prm.p > 3.0)) throw Error(ErrorKind::configuration, op, "requires 3 < p < 6");
  ScalingPath const path(U0.u, prm);
  ScalingPath const limit(U0.u, prm.with_c(infinity));
  MountainPass mp;
  double t0 = 2.0;
  while (!(limit.energy(t0) < 0.0)) {
    t0 *= 2.0;
    if (t0 > 1e6) throw Error(ErrorKind::search_failure, op, "no negative path energy before t = 1e6");
  }
  mp.t0 = t0;
  std::vector<double> vals(static_cast<std::size_t>(samples) + 1);
  std::size_t best = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = path.energy(t0 * static_cast<double>(i) / samples);
    if (vals[i] > vals[best]) best = i;
  }
  double a = t0 * static_cast<double>(best == 0 ? 0 : best - 1) / samples;
  double b = t0 * static_cast<double>(std::min<std::size_t>(best + 1, vals.size() - 1)) / samples;
  double const phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = path.energy(x1), f2 = path.energy(x2);
  for (int i = 0; i < 200 && b - a > 1e-12 * std::max(1.0, b); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = path.energy(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = path.energy(x1);
    }
  }
  mp.t_argmax = 0.5 * (a + b);
  mp.e_hat = std::max(path.energy(mp.t_argmax), vals[best]);
  return mp;
}

}  // namespace soliton
