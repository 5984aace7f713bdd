// Acceptance suite: one PASS/FAIL line per criterion. Exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "soliton/limits.hpp"

using namespace soliton;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Params unit_params(double p, double q, double c = infinity) {
  Params prm;
  prm.m = 1.0;
  prm.mu = 1.0;
  prm.q = q;
  prm.p = p;
  prm.c = c;
  return prm;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, std::string const& what) {
    if (!ok) {
      pass = false;
      detail << "[" << what << "] ";
    }
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

SolverConfig const cfg{};

struct Labeled {
  std::string label;
  SolveReport report;
};

// Converged solutions shared by the identity, bracket and decay checks.
struct Suite {
  std::vector<Labeled> solutions;
  std::optional<SolveReport> ground_p4;  // c = infinity, p = 4, q = 0.5 on the default grid
  std::vector<Labeled> weak_coupling;  // q -> 0 cases
  std::string failures;
};

Suite build_suite() {
  Suite s;
  auto const g = make_grid(8000, 24.0);
  for (double p : {3.5, 4.0, 5.0}) {
    std::string const tag = "p=" + sci(p);
    Params const prm = unit_params(p, 0.5);
    SolveReport const U = minimize_nsp_ground(prm, g, cfg);
    if (p == 4.0) s.ground_p4 = U;
    s.solutions.push_back({tag + " c=inf", U});
    std::vector<double> cs = p == 4.0 ? std::vector<double>{32, 16, 8, 4} : std::vector<double>{8};
    Branch const br = continuation({"c", cs}, prm, U, cfg);
    if (br.truncated) s.failures += tag + " c-branch truncated: " + br.message + "; ";
    for (std::size_t i = 1; i < br.points.size(); ++i)
      s.solutions.push_back({tag + " c=" + sci(br.points[i].value), br.points[i].report});
    s.solutions.push_back({tag + " NLS", solve_nls_ground(prm, g, cfg)});
    s.weak_coupling.push_back({tag + " q=1e-4", minimize_nsp_ground(unit_params(p, 1e-4), g, cfg)});
  }
  auto const g40 = make_grid(12000, 40.0);
  Params const low = unit_params(2.5, 0.0125);
  s.solutions.push_back({"p=2.5 NLS", solve_nls_ground(low, g40, cfg)});
  auto const study = two_branch_study(low, {0.0125}, {32.0}, g40, cfg);
  auto const& cell = study.cells.front();
  if (cell.u_inf) s.solutions.push_back({"p=2.5 u c=inf", *cell.u_inf});
  else s.failures += "p=2.5 u branch: " + cell.u_message + "; ";
  if (cell.v_inf) s.solutions.push_back({"p=2.5 v c=inf", *cell.v_inf});
  else s.failures += "p=2.5 v branch: " + cell.v_message + "; ";
  for (auto const& row : cell.rows) {
    if (row.u) s.solutions.push_back({"p=2.5 u c=32", *row.u});
    else s.failures += "p=2.5 u at c=32 missing; ";
    if (row.v) s.solutions.push_back({"p=2.5 v c=32", *row.v});
    else s.failures += "p=2.5 v at c=32 missing; ";
  }
  return s;
}

// 1. Screened solve at very large c against the closed-form Newtonian potential.
void poisson_oracle(Outcome& o) {
  auto const t0 = Clock::now();
  auto const g = make_grid(2000, 30.0);
  auto const u = RadialField::sample(g, [](double r) { return std::exp(-r); });
  Params const prm = unit_params(4.0, 1.0, 1e4);
  auto const phi = solve_phi_c(u, prm).phi;
  double const elapsed = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    double const exact = oracle::phi_exp(g.r(j), prm.q * prm.m);
    worst = std::max(worst, std::abs(phi[j] - exact) / std::abs(exact));
  }
  o.require(worst <= 1e-3, "node-wise relative error");
  o.require(elapsed < 1.0, "runtime");
  o.detail << "max rel err " << sci(worst) << ", " << sci(elapsed) << " s";
}

// 2. Symmetric finite differences of both actions against the discrete gradient.
void gradient_consistency(Outcome& o) {
  auto const t0 = Clock::now();
  auto const g = make_grid(1500, 20.0);
  auto f = [&](auto fn) { return RadialField::sample(g, fn); };
  std::vector<std::pair<RadialField, RadialField>> const pairs{
      {f([](double r) { return std::exp(-r); }), f([](double r) { return std::exp(-2.0 * r); })},
      {f([](double r) { return 1.5 * std::exp(-r * r / 3.0); }), f([](double r) { return r * std::exp(-r); })},
      {f([](double r) { return (1.0 + r) * std::exp(-r); }), f([](double r) { return std::cos(r) * std::exp(-0.5 * r); })},
      {f([](double r) { return 2.0 / std::cosh(r); }), f([](double r) { return -0.5 * std::exp(-1.5 * r); })},
      {f([](double r) { return 0.7 * std::exp(-0.6 * r) * (1.0 - 0.3 * std::sin(r)); }),
       f([](double r) { return std::exp(-r * r); })},
  };
  double worst = 0.0;
  int checks = 0;
  for (auto const& [u, v] : pairs)
    for (double c : {infinity, 2.0, 10.0}) {
      Params const prm = unit_params(4.0, 1.0, c);
      auto action = [&](RadialField const& w) {
        return prm.nonrelativistic() ? action_nsp(w, prm).action : action_nmkg(w, prm).action;
      };
      double const eps = 1e-5;
      double const fd = (action(u + eps * v) - action(u - eps * v)) / (2.0 * eps);
      double const pairing = inner(gradient(u, prm), v);
      worst = std::max(worst, std::abs(fd - pairing) / std::max(std::abs(pairing), 1e-12));
      ++checks;
    }
  double const elapsed = seconds_since(t0);
  o.require(worst <= 1e-4, "relative mismatch");
  o.require(elapsed < 10.0, "runtime");
  o.detail << checks << " checks, max rel " << sci(worst) << ", " << sci(elapsed) << " s";
}

// 3. J, P and the energy identities at every converged solution of the suite.
void critical_point_identities(Suite const& s, Outcome& o) {
  if (!s.failures.empty()) o.require(false, s.failures);
  double worst_jp = 0.0, worst_id = 0.0;
  for (auto const& [label, rep] : s.solutions) {
    auto const& e = rep.energy;
    if (!rep.converged) {
      o.require(false, label + " not converged");
      continue;
    }
    double const jp = std::max(std::abs(e.nehari), std::abs(e.pohozaev)) / e.scale();
    double id = 0.0;
    if (rep.params.nonrelativistic()) {
      // I = (2(p-3) G + (p-2) a M) / (5p - 12) at c = infinity
      id = std::abs(e.action - nsp_level_from_quadratic_terms(e)) / std::abs(e.action);
    } else {
      auto const ident = energy_identity(e);
      id = std::abs(ident.scaled_action - ident.closed_form) / std::abs(ident.closed_form);
    }
    if (jp > 1e-4) o.require(false, label + " |J|,|P| " + sci(jp));
    if (id > 1e-4) o.require(false, label + " identity " + sci(id));
    worst_jp = std::max(worst_jp, jp);
    worst_id = std::max(worst_id, id);
  }
  o.detail << s.solutions.size() << " solutions, max |J|,|P|/scale " << sci(worst_jp) << ", max identity rel "
           << sci(worst_id);
}

// 4. Shooting against descent, and the frequency scaling of the NLS soliton.
void nls_cross_validation(Outcome& o) {
  Params prm = unit_params(4.0, 0.5);
  prm.mu = 0.5;  // 2 m mu = 1
  auto const g = make_grid(8000, 24.0);
  auto const profile = nls_shooting_profile(prm, g, cfg);
  auto const descent = descend_nls_ground(prm, g, cfg);
  double const h1 = h1_distance(profile, descent.u) / h1_norm(profile);
  o.require(descent.converged, "descent converged");
  o.require(h1 <= 1e-4, "H1 agreement");
  auto const base = solve_nls_ground(prm, g, cfg);
  double worst = 0.0;
  for (double lambda : {0.5, 2.0}) {
    Params pl = prm;
    pl.mu = 0.5 * lambda;
    auto const w = solve_nls_ground(pl, make_grid(8000, 24.0 / std::sqrt(lambda)), cfg);
    double const amp = std::pow(lambda, 1.0 / (prm.p - 2.0));
    double d = 0.0;
    for (std::size_t j = 0; j < w.u.size(); ++j) d = std::max(d, std::abs(w.u[j] - amp * base.u[j]));
    worst = std::max(worst, d / norms(w.u).Linf);
  }
  o.require(worst <= 1e-5, "scaling law");
  o.detail << "H1 rel " << sci(h1) << ", scaling Linf rel " << sci(worst);
}

// 5. Ground states along c -> infinity.
void nonrelativistic_limit(Outcome& o) {
  auto const t0 = Clock::now();
  auto const res = nonrelativistic_limit_study(unit_params(4.0, 0.5), {4, 8, 16, 32}, make_grid(2000, 24.0), cfg);
  double const elapsed = seconds_since(t0);
  o.require(!res.truncated, "branch truncated: " + res.message);
  o.require(res.rows.size() == 4, "four rows");
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    auto const& r = res.rows[i];
    o.require(r.energy <= res.e_inf + 1e-4 * std::abs(res.e_inf), "E_c <= E_inf at c=" + sci(r.c));
    if (i > 0) {
      o.require(r.h1_gap < res.rows[i - 1].h1_gap, "H1 gap monotone at c=" + sci(r.c));
      o.require(r.h2_gap < res.rows[i - 1].h2_gap, "H2 gap monotone at c=" + sci(r.c));
    }
  }
  o.require(res.fitted_order >= 0.7 && res.fitted_order <= 1.3, "fitted order");
  o.require(elapsed < 120.0, "runtime");
  o.detail << "fitted order " << sci(res.fitted_order) << ", " << sci(elapsed) << " s";
}

// 6. Mountain-pass level along the dilation path of the c = infinity ground state.
void mountain_pass_bracket(Suite const& s, Outcome& o) {
  SolveReport const& U = s.ground_p4.value();
  Params const prm = unit_params(4.0, 0.5);
  std::vector<double> gaps;
  for (double c : {8.0, 16.0, 32.0}) gaps.push_back(std::abs(mountain_pass_level(U, prm.with_c(c)).e_hat - U.energy.action));
  double const r1 = gaps[0] / gaps[1], r2 = gaps[1] / gaps[2];
  o.require(r1 >= 2.8 && r1 <= 5.2, "ratio 8->16");
  o.require(r2 >= 2.8 && r2 <= 5.2, "ratio 16->32");
  o.detail << "gap ratios " << sci(r1) << ", " << sci(r2);
}

// 7. Perturbative and global branches at small charge.
void two_branch_structure(std::vector<SolveReport>& fields, Outcome& o) {
  auto const res =
      two_branch_study(unit_params(2.5, 0.05), {0.1, 0.05, 0.025}, {8, 16, 32}, make_grid(12000, 40.0), cfg, 3);
  TwoBranchCell const* at = nullptr;
  for (auto const& cell : res.cells) {
    if (cell.q == 0.05) at = &cell;
    for (auto const& row : cell.rows) {
      if (row.u) fields.push_back(*row.u);
      if (row.v) fields.push_back(*row.v);
    }
  }
  if (at == nullptr) {
    o.require(false, "no q=0.05 cell");
    return;
  }
  if (!at->u_inf) o.require(false, "u_inf at q=0.05: " + at->u_message);
  if (!at->v_inf) o.require(false, "v_inf at q=0.05: " + at->v_message);
  TwoBranchRow const* c32 = nullptr;
  for (auto const& row : at->rows)
    if (row.c == 32.0) c32 = &row;
  if (c32 && c32->u && c32->v) {
    double const bound = 0.1 * std::max(c32->u_norm, c32->v_norm);
    o.require(c32->u->positivity && c32->v->positivity, "positivity at c=32");
    o.require(c32->distinctness > bound, "distinct at c=32");
    o.detail << "||u-v|| " << sci(c32->distinctness) << " vs " << sci(bound) << "; ";
  } else {
    o.require(false, "two converged solutions at c=32");
  }
  // rows are c increasing: gaps must shrink from c=8 to c=32
  for (std::size_t i = 1; i < at->rows.size(); ++i) {
    auto const& a = at->rows[i - 1];
    auto const& b = at->rows[i];
    if (!(b.u_gap < a.u_gap)) o.require(false, "u gap decreasing at c=" + sci(b.c));
    if (!(b.v_gap < a.v_gap)) o.require(false, "v gap decreasing at c=" + sci(b.c));
  }
  std::vector<double> vnorm;
  for (auto const& cell : res.cells) vnorm.push_back(cell.v_inf ? h1_norm(cell.v_inf->u) : nan_value);
  // cells are q decreasing
  bool grows = vnorm.size() == 3;
  for (std::size_t i = 1; i < vnorm.size(); ++i) grows = grows && vnorm[i] > vnorm[i - 1];
  o.require(grows, "||v_inf|| grows as q halves");
  o.detail << "||v_inf|| at q=0.1,0.05,0.025: ";
  for (double v : vnorm) o.detail << sci(v) << " ";
}

// 8. Every computed field within the maximum-principle bracket, without tolerance.
void maximum_principle(Suite const& s, std::vector<SolveReport> const& extra, Outcome& o) {
  std::size_t nodes = 0, fields = 0;
  auto check = [&](RadialField const& phi, Params const& prm, std::string const& label) {
    double const lower = field_lower_bound(prm);
    ++fields;
    for (std::size_t j = 0; j < phi.size(); ++j) {
      ++nodes;
      if (!(phi[j] <= 0.0 && phi[j] >= lower)) {
        o.require(false, label + " at node " + std::to_string(j));
        return;
      }
    }
  };
  for (auto const& [label, rep] : s.solutions) check(rep.phi, rep.params, label);
  for (auto const& [label, rep] : s.weak_coupling) check(rep.phi, rep.params, label);
  for (auto const& rep : extra) check(rep.phi, rep.params, "two-branch field");
  auto const g = make_grid(2000, 30.0);
  for (double amp : {1.0, 10.0, 100.0, 1e4})
    for (double c : {1.01, 2.0, 32.0}) {
      Params const prm = unit_params(4.0, 1.0, c);
      auto const u = RadialField::sample(g, [&](double r) { return amp * std::exp(-r); });
      check(solve_phi_c(u, prm).phi, prm, "amplitude " + sci(amp) + " c=" + sci(c));
    }
  o.detail << fields << " fields, " << nodes << " nodes";
}

// 9. Exponential tails: clean fits everywhere, linearized rate when the coupling vanishes.
void decay_property(Suite const& s, Outcome& o) {
  double worst_r2 = 1.0, worst_ratio = 0.0;
  for (auto const& [label, rep] : s.solutions) {
    auto const fit = decay_fit(rep);
    if (!(fit.r_squared > 0.99 && fit.rate < 0.0)) o.require(false, label + " R2 " + sci(fit.r_squared));
    worst_r2 = std::min(worst_r2, fit.r_squared);
  }
  for (auto const& [label, rep] : s.weak_coupling) {
    auto const fit = decay_fit(rep);
    double const dev = std::abs(fit.ratio - 1.0);
    if (!(fit.r_squared > 0.99 && fit.rate < 0.0 && dev <= 0.15))
      o.require(false, label + " ratio " + sci(fit.ratio));
    worst_r2 = std::min(worst_r2, fit.r_squared);
    worst_ratio = std::max(worst_ratio, dev);
  }
  o.detail << "min R2 " << sci(worst_r2) << ", max |rate/linearized - 1| at q->0 " << sci(worst_ratio);
}

// 10. Inadmissible parameters are rejected with the conditions spelled out.
void validation_contract(Outcome& o) {
  auto rejects = [&](Params const& prm, std::string const& needle, std::string const& label) {
    try {
      require_admissible(prm, "acceptance");
    } catch (Error const& e) {
      bool const ok = e.kind() == ErrorKind::configuration && std::string(e.what()).find(needle) != std::string::npos;
      o.require(ok, label + " message: " + e.what());
      return;
    }
    o.require(false, label + " accepted");
  };
  rejects(unit_params(2.0, 0.5), "p <= 2 or p >= 6", "p=2");
  rejects(unit_params(6.0, 0.5), "p <= 2 or p >= 6", "p=6");
  rejects(unit_params(4.0, 0.5, 1.0), "c > sqrt(mu/m)", "c=1");
  rejects(unit_params(4.0, 0.5, 0.5), "c > sqrt(mu/m)", "c=0.5");
  Params heavy = unit_params(4.0, 0.5, 1.9);
  heavy.mu = 4.0;  // threshold sqrt(mu/m) = 2
  rejects(heavy, "c > sqrt(mu/m)", "c=1.9 mu=4");
  bool solver_rejects = false;
  try {
    minimize_nsp_ground(unit_params(6.0, 0.5), make_grid(200, 10.0), cfg);
  } catch (Error const& e) {
    solver_rejects = std::string(e.what()).find("p <= 2 or p >= 6") != std::string::npos;
  }
  o.require(solver_rejects, "solver entry point rejects p=6");
  o.detail << "5 parameter sets rejected";
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, char const* name, std::function<void(Outcome&)> const& body) {
    Outcome o;
    auto const t0 = Clock::now();
    try {
      body(o);
    } catch (std::exception const& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail.str() << " ("
              << sci(seconds_since(t0)) << " s)" << std::endl;
  };

  report(1, "Poisson oracle equivalence", poisson_oracle);
  report(2, "gradient consistency", gradient_consistency);
  std::optional<Suite> suite;
  std::string suite_error;
  try {
    suite = build_suite();
  } catch (std::exception const& e) {
    suite_error = e.what();
  }
  auto with_suite = [&](auto fn) {
    return [&, fn](Outcome& o) {
      if (!suite_error.empty()) throw std::runtime_error("default suite: " + suite_error);
      fn(o);
    };
  };
  report(3, "critical-point identities", with_suite([&](Outcome& o) { critical_point_identities(*suite, o); }));
  report(4, "NLS cross-validation", nls_cross_validation);
  report(5, "nonrelativistic limit", nonrelativistic_limit);
  report(6, "mountain-pass bracket", with_suite([&](Outcome& o) { mountain_pass_bracket(*suite, o); }));
  std::vector<SolveReport> branch_fields;
  report(7, "two-branch structure", [&](Outcome& o) { two_branch_structure(branch_fields, o); });
  report(8, "maximum-principle bracket",
         with_suite([&](Outcome& o) { maximum_principle(*suite, branch_fields, o); }));
  report(9, "decay property", with_suite([&](Outcome& o) { decay_property(*suite, o); }));
  report(10, "validation contract", validation_contract);
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
