#pragma once

// Studies built on the solvers: the c -> infinity limit of ground states, the two solution
// branches for 2 < p < 3, nonexistence checks and exponential-decay fits.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <limits>
#include <string>
#include <vector>

#include "soliton/ground_state.hpp"

namespace soliton {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

/// ||d||_L2 + ||Delta d||_L2, an equivalent H^2 norm for fields vanishing at r_max.
inline double h2_proxy(RadialField const& d) {
  RadialField const lap = laplacian_radial(d);
  return std::sqrt(inner(d, d)) + std::sqrt(inner(lap, lap));
}

/// Least-squares slope of log y against log x.
inline double fit_log_slope(std::vector<double> const& x, std::vector<double> const& y) {
  if (x.size() < 2) return nan_value;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double const n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double const lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct LimitRow {
  double c = 0.0;
  double energy = 0.0;
  double energy_gap = 0.0;
  double h1_gap = 0.0;
  double h2_gap = 0.0;
  SolveReport report;
};

struct LimitStudyResult {
  Params params;
  double e_inf = nan_value;
  std::vector<LimitRow> rows;  // c increasing
  double fitted_order = nan_value;
  bool truncated = false;
  std::string message;
  std::optional<SolveReport> ground_inf;
};

/// Ground state at c = infinity, then a continuation branch to every requested c.
inline LimitStudyResult nonrelativistic_limit_study(Params const& base, std::vector<double> c_list,
                                                    RadialGrid const& grid, SolverConfig const& cfg) {
  char const* op = "nonrelativistic_limit_study";
  Params const inf = base.with_c(infinity);
  require_admissible(inf, op);
  if (!(base.p > 3.0)) throw Error(ErrorKind::configuration, op, "requires 3 < p < 6");
  LimitStudyResult out;
  out.params = inf;
  if (c_list.empty()) return out;
  for (double c : c_list) require_admissible(base.with_c(c), op);
  SolveReport const U = minimize_nsp_ground(inf, grid, cfg);
  out.e_inf = U.energy.action;
  std::sort(c_list.begin(), c_list.end(), std::greater<>());
  c_list.erase(std::unique(c_list.begin(), c_list.end()), c_list.end());
  Branch const br = continuation({"c", c_list}, inf, U, cfg);
  out.truncated = br.truncated;
  out.message = br.message;
  for (std::size_t i = 1; i < br.points.size(); ++i) {
    auto const& pt = br.points[i];
    RadialField const d = pt.report.u - U.u;
    out.rows.push_back({pt.value, pt.report.energy.action, std::abs(pt.report.energy.action - out.e_inf),
                        h1_norm(d), h2_proxy(d), pt.report});
  }
  std::reverse(out.rows.begin(), out.rows.end());
  std::vector<double> x, y;
  for (auto const& r : out.rows)
    if (r.energy_gap > 0.0) {
      x.push_back(1.0 / (r.c * r.c));
      y.push_back(r.energy_gap);
    }
  out.fitted_order = fit_log_slope(x, y);
  out.ground_inf = U;
  return out;
}

struct DecayFit {
  double rate = 0.0;  // fitted slope of log u (negative)
  double r_squared = 0.0;
  double linearized_rate = 0.0;  // -sqrt(2 m mu - mu^2/c^2)
  double ratio = 0.0;            // rate / linearized_rate
};

/// Linearized decay rate sqrt(a) of the report's model.
inline double linearized_decay_rate(Params const& prm) {
  double const a = prm.nonrelativistic() ? 2.0 * prm.m * prm.mu : coefficients(prm).a;
  return -std::sqrt(a);
}

/// Least-squares line through log u on [0.5 r_max, 0.8 r_max].
inline DecayFit decay_fit(SolveReport const& rep) {
  auto const& g = rep.u.grid();
  std::vector<double> x, y;
  for (std::size_t j = 0; j < g.size(); ++j) {
    double const r = g.r(j);
    if (r < 0.5 * g.r_max() || r > 0.8 * g.r_max()) continue;
    if (!(rep.u[j] >= 1e-300))
      throw Error(ErrorKind::window_underflow, "decay_fit",
                  "u < 1e-300 at r = " + format_number(r) + "; shrink r_max or the window");
    x.push_back(r);
    y.push_back(std::log(rep.u[j]));
  }
  if (x.size() < 3) throw Error(ErrorKind::window_underflow, "decay_fit", "fewer than 3 nodes in the window");
  double const n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double const slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double const icpt = (sy - slope * sx) / n;
  double const mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double const e = y[i] - (icpt + slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  DecayFit out;
  out.rate = slope;
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  out.linearized_rate = linearized_decay_rate(rep.params);
  out.ratio = out.rate / out.linearized_rate;
  return out;
}

struct TwoBranchRow {
  double c = 0.0;
  bool u_converged = false;
  bool v_converged = false;
  double u_gap = nan_value;  // ||u_c - u_inf||_H1
  double v_gap = nan_value;  // ||v_c - v_inf||_H1
  double distinctness = nan_value;  // ||u_c - v_c||_H1
  double u_norm = nan_value;
  double v_norm = nan_value;
  std::optional<SolveReport> u;
  std::optional<SolveReport> v;
};

struct TwoBranchCell {
  double q = 0.0;
  std::optional<SolveReport> u_inf;  // perturbative solution w_{inf,q}
  std::optional<SolveReport> v_inf;  // global minimizer
  std::string u_message;
  std::string v_message;
  bool v_collapsed = false;
  bool u_truncated = false;  // q-continuation stopped before reaching q
  std::vector<TwoBranchRow> rows;  // c increasing
};

struct TwoBranchResult {
  Params params;
  std::vector<TwoBranchCell> cells;  // q decreasing
  bool truncated = false;
};

namespace detail {

inline TwoBranchCell two_branch_cell(Params const& base, double q, std::vector<double> const& c_desc,
                                     RadialGrid const& grid, SolverConfig const& cfg) {
  TwoBranchCell cell;
  cell.q = q;
  Params const pq = base.with_c(infinity).with_q(q);
  try {
    SolveReport const w0 = solve_nls_ground(pq, grid, cfg);
    Branch const br = continuation({"q", {q}}, pq.with_q(0.0), w0, cfg);
    cell.u_truncated = br.truncated;
    if (br.truncated)
      cell.u_message = "q-continuation from the NLS soliton truncated near q = " + format_number(br.failed_value) +
                       ": " + br.message;
    else
      cell.u_inf = br.points.back().report;
  } catch (Error const& e) {
    cell.u_message = e.what();
  }
  try {
    cell.v_inf = minimize_nsp_global(pq, grid, cfg);
  } catch (Error const& e) {
    cell.v_message = e.what();
    cell.v_collapsed = e.kind() == ErrorKind::collapse_to_zero;
  }
  std::map<double, TwoBranchRow> rows;
  for (double c : c_desc) rows[c].c = c;
  auto run = [&](std::optional<SolveReport> const& seed, bool is_u) {
    if (!seed) return;
    Branch const br = continuation({"c", c_desc}, pq, *seed, cfg);
    for (std::size_t i = 1; i < br.points.size(); ++i) {
      auto& row = rows[br.points[i].value];
      auto const& rep = br.points[i].report;
      double const gap = h1_distance(rep.u, seed->u);
      if (is_u) {
        row.u_converged = true;
        row.u_gap = gap;
        row.u_norm = h1_norm(rep.u);
        row.u = rep;
      } else {
        row.v_converged = true;
        row.v_gap = gap;
        row.v_norm = h1_norm(rep.u);
        row.v = rep;
      }
    }
    if (br.truncated) (is_u ? cell.u_message : cell.v_message) += "c-branch truncated: " + br.message;
  };
  run(cell.u_inf, true);
  run(cell.v_inf, false);
  for (auto& [c, row] : rows) {
    if (row.u && row.v) row.distinctness = h1_distance(row.u->u, row.v->u);
    cell.rows.push_back(std::move(row));
  }
  return cell;
}

}  // namespace detail

/// For each q: the perturbative branch (q-continuation from the NLS soliton) and the global
/// minimizer at c = infinity, each continued to the requested finite c. Cells run on up to
/// `jobs` threads and are merged in q order.
inline TwoBranchResult two_branch_study(Params const& base, std::vector<double> q_list, std::vector<double> c_list,
                                        RadialGrid const& grid, SolverConfig const& cfg, int jobs = 1) {
  char const* op = "two_branch_study";
  if (!(base.p > 2.0 && base.p < 3.0)) throw Error(ErrorKind::configuration, op, "requires 2 < p < 3");
  for (double q : q_list) require_admissible(base.with_c(infinity).with_q(q), op);
  for (double c : c_list) require_admissible(base.with_c(c).with_q(q_list.empty() ? base.q : q_list.front()), op);
  std::sort(q_list.begin(), q_list.end(), std::greater<>());
  q_list.erase(std::unique(q_list.begin(), q_list.end()), q_list.end());
  std::sort(c_list.begin(), c_list.end(), std::greater<>());
  c_list.erase(std::unique(c_list.begin(), c_list.end()), c_list.end());

  TwoBranchResult out;
  out.params = base;
  out.cells.resize(q_list.size());
  std::size_t const workers = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < q_list.size(); start += workers) {
    std::vector<std::future<TwoBranchCell>> tasks;
    for (std::size_t i = start; i < std::min(q_list.size(), start + workers); ++i)
      tasks.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, detail::two_branch_cell,
                                 base, q_list[i], c_list, grid, cfg));
    for (std::size_t i = 0; i < tasks.size(); ++i) out.cells[start + i] = tasks[i].get();
  }
  for (auto const& cell : out.cells) {
    if (cell.u_truncated) out.truncated = true;
    for (auto const& row : cell.rows)
      if ((cell.u_inf && !row.u_converged) || (cell.v_inf && !row.v_converged)) out.truncated = true;
  }
  return out;
}

struct ValidationCase {
  double p = 0.0;
  bool rejected = false;
  std::string message;
};

struct DiagnosticFlow {
  double p = 0.0;
  std::string outcome;  // "converged", "collapse", "blow-up", "stalled"
  int iterations = 0;
  double u0 = 0.0;
  double relative_gradient = 0.0;
  double action = 0.0;
};

struct NonexistenceReport {
  std::vector<ValidationCase> validation;
  std::vector<DiagnosticFlow> flows;
};

namespace detail {

/// Nehari-rescaled descent for -Delta u + 2 m mu u = |u|^{p-2} u without the range check.
/// Records whether the flow settles, vanishes or concentrates.
inline DiagnosticFlow diagnostic_flow(Params const& prm, RadialGrid const& grid, int iterations) {
  Coefficients const k = nls_coefficients(prm);
  DiagnosticFlow out;
  out.p = prm.p;
  RadialField const zero(grid);
  RadialField u = RadialField::sample(grid, [&](double r) { return std::exp(-0.5 * k.a * r * r); });
  u[u.size() - 1] = 0.0;
  double const u_start = u[0];
  double tau = 0.5;
  for (int it = 0; it < iterations; ++it) {
    auto const t = energy_terms(u, zero, k.p, true);
    double const s = std::pow((t.gradient + k.a * t.mass) / t.power, 1.0 / (k.p - 2.0));
    if (!std::isfinite(s)) {
      out.outcome = "blow-up";
      break;
    }
    u *= s;
    EnergyReport const rep = report_for(u, zero, k, true);
    out.iterations = it + 1;
    out.u0 = u[0];
    out.action = rep.action;
    out.relative_gradient = relative_gradient(rep);
    if (norms(u).H1 < 1e-8) {
      out.outcome = "collapse";
      return out;
    }
    if (u[0] > 1e6 * u_start) {
      out.outcome = "blow-up";
      return out;
    }
    if (out.relative_gradient <= 1e-9) {
      out.outcome = "converged";
      return out;
    }
    RadialField const d = precondition(residual_with_field(u, zero, k, true), k.a);
    bool accepted = false;
    while (tau > 1e-12 && !accepted) {
      RadialField trial = with_even_center(u - tau * d);
      auto const tt = energy_terms(trial, zero, k.p, true);
      double const st = std::pow((tt.gradient + k.a * tt.mass) / tt.power, 1.0 / (k.p - 2.0));
      trial *= st;
      if (std::isfinite(st) && report_for(trial, zero, k, true).action <= rep.action) {
        u = std::move(trial);
        tau = std::min(1.0, tau * 1.5);
        accepted = true;
      } else {
        tau *= 0.5;
      }
    }
    if (!accepted) break;
  }
  if (out.outcome.empty()) out.outcome = "stalled";
  return out;
}

}  // namespace detail

/// Validation of the exponent range plus descent flows on either side of p = 6.
inline NonexistenceReport nonexistence_sweep(Params const& base, RadialGrid const& grid, int iterations = 400) {
  NonexistenceReport out;
  for (double p : {1.5, 2.0, 6.0, 7.0}) {
    auto const adm = admissible(base.with_p(p));
    ValidationCase vc{p, !adm.ok, ""};
    for (auto const& v : adm.violations) vc.message += (vc.message.empty() ? "" : "; ") + v;
    out.validation.push_back(vc);
  }
  for (double p : {5.99, 6.01}) out.flows.push_back(detail::diagnostic_flow(base.with_p(p), grid, iterations));
  return out;
}

}  // namespace soliton
