#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "soliton/errors.hpp"

namespace soliton {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Physical parameters. c = infinity selects the Schrodinger-Poisson model.
struct Params {
  double m = 1.0;
  double mu = 1.0;
  double q = 0.5;
  double c = infinity;
  double p = 4.0;

  bool nonrelativistic() const noexcept { return std::isinf(c); }

  // Relativistic triple (finite c only).
  double m_bar() const noexcept { return m * c; }
  double e() const noexcept { return q / c; }
  double omega() const noexcept { return (m * c * c - mu) / c; }

  Params with_c(double value) const {
    Params out = *this;
    out.c = value;
    return out;
  }
  Params with_q(double value) const {
    Params out = *this;
    out.q = value;
    return out;
  }
  Params with_p(double value) const {
    Params out = *this;
    out.p = value;
    return out;
  }
};

/// Coefficients of the unified action
///   I(u) = 1/2 int |grad u|^2 + a u^2 - b u^2 Phi_u  - 1/p int |u|^p,
///   -Delta Phi + kappa u^2 Phi = -b u^2.
/// For c = infinity: a = 2 m mu, b = q m, kappa = 0.
struct Coefficients {
  double a = 0.0;
  double b = 0.0;
  double kappa = 0.0;
  double p = 4.0;
};

inline Coefficients coefficients(Params const& prm) {
  if (prm.nonrelativistic()) return {2.0 * prm.m * prm.mu, prm.q * prm.m, 0.0, prm.p};
  double const c2 = prm.c * prm.c;
  return {2.0 * prm.m * prm.mu - prm.mu * prm.mu / c2, prm.q * (prm.m - prm.mu / c2), prm.q * prm.q / c2, prm.p};
}

struct Admissibility {
  bool ok = true;
  std::vector<std::string> violations;
  /// c >= sqrt(2m/mu), the threshold under which positivity of critical points is asserted.
  bool positivity_threshold = true;
};

inline std::string format_number(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline Admissibility admissible(Params const& prm) {
  Admissibility out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.violations.push_back(std::move(msg));
  };
  if (!(prm.m > 0.0) || !std::isfinite(prm.m)) fail("requires m > 0");
  if (!(prm.mu > 0.0) || !std::isfinite(prm.mu)) fail("requires mu > 0");
  if (!(prm.q > 0.0) || !std::isfinite(prm.q)) fail("requires q > 0");
  if (!(prm.p > 2.0 && prm.p < 6.0))
    fail("requires 2 < p < 6: no nontrivial solutions exist for p <= 2 or p >= 6 (got p = " +
         format_number(prm.p) + ")");
  if (!prm.nonrelativistic()) {
    if (!(prm.c > 0.0)) {
      fail("requires c > sqrt(mu/m) (got c = " + format_number(prm.c) + ")");
    } else if (prm.m > 0.0 && prm.mu > 0.0) {
      double const threshold = std::sqrt(prm.mu / prm.m);
      if (!(prm.c > threshold))
        fail("requires c > sqrt(mu/m) = " + format_number(threshold) + " (got c = " + format_number(prm.c) +
             "), equivalently 0 < omega < m_bar");
      out.positivity_threshold = prm.c >= std::sqrt(2.0 * prm.m / prm.mu);
    }
  }
  return out;
}

inline void require_admissible(Params const& prm, std::string const& operation) {
  auto const adm = admissible(prm);
  if (adm.ok) return;
  std::string msg;
  for (auto const& v : adm.violations) msg += (msg.empty() ? "" : "; ") + v;
  throw Error(ErrorKind::configuration, operation, msg);
}

/// g(p) bounding the low-power existence range, 2 < p < 4.
inline double g_function(double p) {
  if (p > 2.0 && p < 3.0) return std::sqrt((p - 2.0) * (4.0 - p));
  if (p >= 3.0 && p < 4.0) return 1.0;
  return std::numeric_limits<double>::quiet_NaN();
}

/// h(p) bounding a low-power ground-state range, 2 < p < 4.
inline double h_function(double p) { return 1.0 + (4.0 - p) * (4.0 - p) / (4.0 * (p - 2.0)); }

struct RegimeCondition {
  std::string name;
  std::string statement;
  bool applicable = false;  // p lies in the condition's range
  bool holds = false;
};

struct RegimeReport {
  double m_bar = 0.0;
  double e = 0.0;
  double omega = 0.0;
  double g = std::numeric_limits<double>::quiet_NaN();
  double h = std::numeric_limits<double>::quiet_NaN();
  std::vector<RegimeCondition> existence;
  std::vector<RegimeCondition> nonexistence;
};

/// Known sufficient existence conditions and nonexistence ranges for the relativistic system.
inline RegimeReport regime_report(Params const& prm) {
  if (prm.nonrelativistic())
    throw Error(ErrorKind::configuration, "regime_report", "requires a finite speed of light c");
  require_admissible(prm, "regime_report");
  RegimeReport rep;
  double const p = prm.p;
  double const mb = prm.m_bar();
  double const w = prm.omega();
  rep.m_bar = mb;
  rep.e = prm.e();
  rep.omega = w;
  bool const low = p > 2.0 && p < 4.0;
  if (low) {
    rep.g = g_function(p);
    rep.h = h_function(p);
  }
  bool const base = w > 0.0 && w < mb;
  rep.existence.push_back({"high_power", "4 < p < 6 and 0 < omega < m_bar", p > 4.0 && p < 6.0,
                           p > 4.0 && p < 6.0 && base});
  bool const dm_high = p >= 4.0 && p < 6.0 && base;
  bool const dm_low = low && w > 0.0 && std::sqrt(2.0) * w < mb * std::sqrt(p - 2.0);
  rep.existence.push_back({"sqrt2_frequency_bound",
                           "4 <= p < 6 and 0 < omega < m_bar, or 2 < p < 4 and 0 < sqrt(2) omega < m_bar sqrt(p-2)",
                           p > 2.0 && p < 6.0, dm_high || dm_low});
  rep.existence.push_back({"g_frequency_bound", "2 < p < 4 and 0 < omega < m_bar g(p)", low,
                           low && w > 0.0 && w < mb * rep.g});
  bool const ap_high = p >= 4.0 && p < 6.0 && base;
  bool const ap_low = low && mb * std::sqrt(p - 1.0) > w * std::sqrt(5.0 - p);
  rep.existence.push_back({"ground_state_sqrt_bound",
                           "4 <= p < 6 and 0 < omega < m_bar, or 2 < p < 4 and m_bar sqrt(p-1) > omega sqrt(5-p)",
                           p > 2.0 && p < 6.0, ap_high || ap_low});
  rep.existence.push_back({"h_frequency_bound", "2 < p < 4 and 0 < sqrt(h(p)) omega < m_bar", low,
                           low && w > 0.0 && std::sqrt(rep.h) * w < mb});
  rep.nonexistence.push_back({"power_outside_range", "p <= 2 or p >= 6 (with 0 < omega <= m_bar)", true,
                              (p <= 2.0 || p >= 6.0) && w > 0.0 && w <= mb});
  return rep;
}

}  // namespace soliton
