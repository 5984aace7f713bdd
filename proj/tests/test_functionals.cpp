#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "soliton/functionals.hpp"

using namespace soliton;

namespace {

Params unit_params(double c = infinity, double p = 4.0) {
  Params prm;
  prm.m = 1.0;
  prm.mu = 1.0;
  prm.q = 1.0;
  prm.p = p;
  prm.c = c;
  return prm;
}

RadialField exp_field(RadialGrid const& g, double amp = 1.0, double a = 1.0) {
  return RadialField::sample(g, [=](double r) { return amp * std::exp(-a * r); });
}

EnergyReport report(RadialField const& u, Params const& prm, bool positive_part = false) {
  return prm.nonrelativistic() ? action_nsp(u, prm, positive_part) : action_nmkg(u, prm, positive_part);
}

// Symmetric difference of the action along v, compared with the discrete gradient pairing.
void expect_directional_derivative(RadialField const& u, RadialField const& v, Params const& prm, double tol) {
  double const eps = 1e-5;
  double const fd = (report(u + eps * v, prm).action - report(u - eps * v, prm).action) / (2.0 * eps);
  double const pairing = inner(gradient(u, prm), v);
  EXPECT_NEAR(pairing, fd, tol * (1.0 + std::abs(pairing))) << "c = " << prm.c << " p = " << prm.p;
}

std::vector<std::pair<RadialField, RadialField>> test_pairs(RadialGrid const& g) {
  auto f = [&](auto fn) { return RadialField::sample(g, fn); };
  return {
      {exp_field(g), exp_field(g, 1.0, 2.0)},
      {f([](double r) { return 1.5 * std::exp(-r * r / 3.0); }), f([](double r) { return r * std::exp(-r); })},
      {f([](double r) { return (1.0 + r) * std::exp(-r); }), f([](double r) { return std::cos(r) * std::exp(-0.5 * r); })},
      {f([](double r) { return 2.0 / std::cosh(r); }), exp_field(g, -0.5, 1.5)},
      {f([](double r) { return 0.7 * std::exp(-0.6 * r) * (1.0 - 0.3 * std::sin(r)); }),
       f([](double r) { return std::exp(-r * r); })},
  };
}

}  // namespace

TEST(Admissible, RelativisticTriple) {
  Params const prm = unit_params(2.0);
  EXPECT_TRUE(admissible(prm).ok);
  EXPECT_DOUBLE_EQ(prm.omega(), 1.5);
  EXPECT_DOUBLE_EQ(prm.m_bar(), 2.0);
  EXPECT_DOUBLE_EQ(prm.e(), 0.5);
  EXPECT_TRUE(admissible(unit_params()).ok);
}

TEST(Admissible, RejectsSubluminalThreshold) {
  auto const adm = admissible(unit_params(0.5));
  EXPECT_FALSE(adm.ok);
  ASSERT_FALSE(adm.violations.empty());
  EXPECT_NE(adm.violations.front().find("c > sqrt(mu/m)"), std::string::npos);
  EXPECT_FALSE(admissible(unit_params(1.0)).ok);
}

TEST(Admissible, RejectsPowersOutsideRange) {
  for (double p : {1.5, 2.0, 6.0, 7.0}) {
    auto const adm = admissible(unit_params(infinity, p));
    EXPECT_FALSE(adm.ok) << p;
    ASSERT_FALSE(adm.violations.empty());
    EXPECT_NE(adm.violations.front().find("p <= 2 or p >= 6"), std::string::npos);
  }
  EXPECT_TRUE(admissible(unit_params(infinity, 4.0)).ok);
}

TEST(Admissible, ReportsPositivityThresholdSeparately) {
  EXPECT_TRUE(admissible(unit_params(2.0)).positivity_threshold);
  auto const adm = admissible(unit_params(1.2));
  EXPECT_TRUE(adm.ok);
  EXPECT_FALSE(adm.positivity_threshold);  // 1.2 < sqrt(2 m / mu)
}

TEST(RegimeReport, RegimeFunctions) {
  EXPECT_NEAR(g_function(2.5), std::sqrt(0.75), 1e-12);
  EXPECT_NEAR(g_function(2.5), 0.86603, 1e-5);
  EXPECT_DOUBLE_EQ(g_function(3.5), 1.0);
  EXPECT_DOUBLE_EQ(h_function(3.0), 1.25);
  EXPECT_TRUE(std::isnan(g_function(4.5)));
}

TEST(RegimeReport, ConditionsForLowAndHighPower) {
  Params prm = unit_params(2.0, 2.5);
  prm.q = 0.1;
  auto const low = regime_report(prm);
  ASSERT_EQ(low.existence.size(), 5u);
  EXPECT_DOUBLE_EQ(low.omega, 1.5);
  // omega / m_bar = 0.75: below g(2.5) = 0.866 but sqrt(2) omega = 2.12 > m_bar sqrt(0.5) = 1.41.
  auto find = [&](RegimeReport const& r, std::string const& name) {
    for (auto const& c : r.existence)
      if (c.name == name) return c;
    ADD_FAILURE() << "missing " << name;
    return RegimeCondition{};
  };
  EXPECT_FALSE(find(low, "high_power").applicable);
  EXPECT_TRUE(find(low, "g_frequency_bound").holds);
  EXPECT_FALSE(find(low, "sqrt2_frequency_bound").holds);
  // m_bar sqrt(1.5) = 2.449 > omega sqrt(2.5) = 2.372
  EXPECT_TRUE(find(low, "ground_state_sqrt_bound").holds);
  // h(2.5) = 2.125: sqrt(h) omega = 2.187 > m_bar = 2
  EXPECT_FALSE(find(low, "h_frequency_bound").holds);
  EXPECT_FALSE(low.nonexistence.front().holds);

  auto const high = regime_report(unit_params(2.0, 4.5));
  EXPECT_TRUE(find(high, "high_power").holds);
  EXPECT_TRUE(std::isnan(high.g));
  EXPECT_THROW(regime_report(unit_params()), Error);
}

TEST(ActionNsp, ZeroField) {
  auto const rep = action_nsp(RadialField(make_grid(100, 10.0)), unit_params());
  EXPECT_EQ(rep.action, 0.0);
  EXPECT_EQ(rep.nehari, 0.0);
  EXPECT_EQ(rep.pohozaev, 0.0);
  EXPECT_EQ(rep.scaling_derivative, 0.0);
  EXPECT_EQ(rep.gradient_norm, 0.0);
}

TEST(ActionNsp, ExponentialTermByTerm) {
  auto const g = make_grid(12000, 30.0);
  auto const rep = action_nsp(exp_field(g), unit_params());
  auto u = [](double r) { return std::exp(-r); };
  double const grad = oracle::volume_integral([&](double r) { return u(r) * u(r); }, 30.0);
  double const mass = grad;
  double const coul = oracle::volume_integral([&](double r) { return u(r) * u(r) * oracle::phi_exp(r, 1.0); }, 30.0);
  double const pow4 = oracle::volume_integral([&](double r) { return std::pow(u(r), 4.0); }, 30.0);
  EXPECT_NEAR(coul, oracle::coulomb_exp(1.0), 1e-10);
  EXPECT_NEAR(rep.terms.gradient, grad, 1e-5 * grad);
  EXPECT_NEAR(rep.terms.mass, mass, 1e-5 * mass);
  EXPECT_NEAR(rep.terms.coulomb, coul, 1e-5 * std::abs(coul));
  EXPECT_NEAR(rep.terms.power, pow4, 1e-5 * pow4);
  double const action = 0.5 * (grad + 2.0 * mass) - 0.5 * coul - 0.25 * pow4;
  EXPECT_NEAR(action, 1.5 * oracle::pi + 3.0 * oracle::pi / 64.0, 1e-10);
  EXPECT_NEAR(rep.action, action, 1e-5 * action);
}

TEST(ActionNsp, ScalingDerivativeMatchesPathDifference) {
  auto const g = make_grid(12000, 30.0);
  auto const prm = unit_params(infinity, 4.0);
  auto along = [&](auto profile, double t) {
    return action_nsp(RadialField::sample(g, [&](double r) { return t * t * profile(t * r); }), prm, true).action;
  };
  auto check = [&](auto profile) {
    double const dt = 1e-4;
    double const fd = (along(profile, 1.0 + dt) - along(profile, 1.0 - dt)) / (2.0 * dt);
    auto const rep = action_nsp(RadialField::sample(g, profile), prm, true);
    ASSERT_TRUE(rep.has_scaling_derivative);
    EXPECT_NEAR(rep.scaling_derivative, fd, 1e-4 * std::abs(fd));
  };
  check([](double r) { return std::exp(-r); });
  check([](double r) { return 1.8 * std::exp(-r * r / 2.0); });
  check([](double r) { return 0.5 * (1.0 + r) * std::exp(-r); });
}

TEST(ActionNmkg, ZeroField) {
  auto const rep = action_nmkg(RadialField(make_grid(100, 10.0)), unit_params(2.0));
  EXPECT_EQ(rep.action, 0.0);
  EXPECT_EQ(rep.nehari, 0.0);
  EXPECT_EQ(rep.pohozaev, 0.0);
  EXPECT_FALSE(rep.has_scaling_derivative);
}

TEST(ActionNmkg, ExponentialTermByTerm) {
  auto const g = make_grid(12000, 30.0);
  Params const prm = unit_params(2.0, 4.0);
  auto const k = coefficients(prm);
  auto const rep = action_nmkg(exp_field(g), prm);
  auto u2 = [](double r) { return std::exp(-2.0 * r); };
  auto const field = oracle::screened_field([](double r) { return std::exp(-r); }, k.kappa, k.b, 30.0, 5e-4);
  double const grad = oracle::volume_integral(u2, 30.0);
  double const mass = grad;
  double const coul = oracle::volume_integral([&](double r) { return u2(r) * field(r); }, 30.0, 1e-12);
  double const scr = oracle::volume_integral([&](double r) { return u2(r) * field(r) * field(r); }, 30.0, 1e-12);
  double const pow4 = oracle::volume_integral([&](double r) { return u2(r) * u2(r); }, 30.0);
  EXPECT_NEAR(rep.terms.gradient, grad, 1e-5 * grad);
  EXPECT_NEAR(rep.terms.mass, mass, 1e-5 * mass);
  EXPECT_NEAR(rep.terms.coulomb, coul, 1e-5 * std::abs(coul));
  EXPECT_NEAR(rep.terms.screening, scr, 1e-5 * scr);
  EXPECT_NEAR(rep.terms.power, pow4, 1e-5 * pow4);
  double const action = 0.5 * grad + 0.5 * k.a * mass - 0.5 * k.b * coul - 0.25 * pow4;
  double const nehari = grad + k.a * mass - k.kappa * scr - 2.0 * k.b * coul - pow4;
  double const pohozaev = 0.5 * grad + 1.5 * k.a * mass - k.kappa * scr - 2.5 * k.b * coul - 0.75 * pow4;
  EXPECT_NEAR(rep.action, action, 1e-5 * std::abs(action));
  EXPECT_NEAR(rep.nehari, nehari, 1e-5 * rep.scale());
  EXPECT_NEAR(rep.pohozaev, pohozaev, 1e-5 * rep.scale());
}

TEST(ActionNmkg, ApproachesNspAsInverseSquareOfC) {
  auto const g = make_grid(3000, 30.0);
  auto const u = exp_field(g);
  double const inf_action = action_nsp(u, unit_params()).action;
  std::vector<double> gaps;
  for (double c : {1e3, 5e2, 2.5e2}) gaps.push_back(std::abs(action_nmkg(u, unit_params(c)).action - inf_action));
  EXPECT_NEAR(gaps[1] / gaps[0], 4.0, 0.05);
  EXPECT_NEAR(gaps[2] / gaps[1], 4.0, 0.05);
  double const K = gaps[0] * 1e6;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    double const c = 1e3 / std::pow(2.0, static_cast<double>(i));
    EXPECT_LE(gaps[i], 1.1 * K / (c * c));
  }
}

TEST(Gradient, ZeroFieldHasZeroResidual) {
  auto const g = make_grid(100, 10.0);
  for (double c : {infinity, 2.0}) {
    auto const r = gradient(RadialField(g), unit_params(c));
    EXPECT_EQ(norms(r).Linf, 0.0);
  }
}

TEST(GradientNsp, DirectionalDerivativeMatchesFiniteDifference) {
  auto const g = make_grid(1500, 20.0);
  expect_directional_derivative(exp_field(g), exp_field(g, 1.0, 2.0), unit_params(infinity, 4.0), 1e-5);
  for (auto const& [u, v] : test_pairs(g))
    for (double p : {2.5, 4.0, 5.0}) expect_directional_derivative(u, v, unit_params(infinity, p), 1e-5);
}

TEST(GradientNmkg, DirectionalDerivativeMatchesFiniteDifference) {
  auto const g = make_grid(1500, 20.0);
  for (auto const& [u, v] : test_pairs(g))
    for (double c : {1.5, 2.0, 10.0}) expect_directional_derivative(u, v, unit_params(c, 4.0), 1e-4);
}

TEST(GradientNmkg, LargeSpeedOfLightMatchesNsp) {
  auto const g = make_grid(2000, 30.0);
  auto const u = exp_field(g);
  auto const r_inf = gradient_nsp(u, unit_params());
  auto const r_c = gradient_nmkg(u, unit_params(1e3));
  double const scale = norms(r_inf).Linf;
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(r_c[j], r_inf[j], 1e-3 * scale);
}

TEST(Gradient, ModelMismatchIsRejected) {
  auto const u = exp_field(make_grid(100, 10.0));
  EXPECT_THROW(gradient_nsp(u, unit_params(2.0)), Error);
  EXPECT_THROW(gradient_nmkg(u, unit_params()), Error);
  EXPECT_THROW(action_nsp(u, unit_params(2.0)), Error);
  EXPECT_THROW(action_nmkg(u, unit_params()), Error);
}

TEST(PositivePart, AgreesExactlyForNonnegativeFields) {
  auto const g = make_grid(500, 15.0);
  auto const u = RadialField::sample(g, [](double r) { return (1.0 + r) * std::exp(-r); });
  for (double c : {infinity, 3.0}) {
    auto const a = report(u, unit_params(c, 3.5), false);
    auto const b = report(u, unit_params(c, 3.5), true);
    EXPECT_EQ(a.action, b.action);
    EXPECT_EQ(a.nehari, b.nehari);
    EXPECT_EQ(a.pohozaev, b.pohozaev);
    EXPECT_EQ(a.gradient_norm, b.gradient_norm);
  }
  auto const sign_changing = RadialField::sample(g, [](double r) { return std::cos(r) * std::exp(-0.5 * r); });
  EXPECT_LT(report(sign_changing, unit_params(), true).terms.power,
            report(sign_changing, unit_params(), false).terms.power);
}

TEST(EnergyIdentity, CombinationReducesToQuadraticTerms) {
  auto const g = make_grid(800, 20.0);
  for (auto const& [u, v] : test_pairs(g)) {
    (void)v;
    for (double c : {infinity, 2.0})
      for (double p : {2.5, 3.5, 4.0, 5.0}) {
        auto const id = energy_identity(report(u, unit_params(c, p), true));
        EXPECT_NEAR(id.combination, id.closed_form, 1e-12 * (std::abs(id.closed_form) + std::abs(id.scaled_action)));
      }
  }
}

TEST(EnergyIdentity, QuadraticLevelMatchesIdentityWithoutScreening) {
  auto const g = make_grid(800, 20.0);
  auto const u = exp_field(g);
  Params const prm = unit_params(infinity, 4.0);
  auto const rep = action_nsp(u, prm);
  double const p = prm.p;
  double const d = 5.0 * p - 12.0;
  // (5p-12)/2 I - J + (4-p)/2 P = closed form = (5p-12)/2 * level at kappa = 0.
  double const via_identity = (0.5 * d * rep.action - rep.nehari + 0.5 * (4.0 - p) * rep.pohozaev) / (0.5 * d);
  EXPECT_NEAR(nsp_level_from_quadratic_terms(rep), via_identity, 1e-12 * std::abs(via_identity));
}

TEST(ScalingPathEnergy, EndpointsAndDomain) {
  auto const g = make_grid(1000, 20.0);
  auto const U0 = RadialField::sample(g, [](double r) { return 1.2 * std::exp(-r * r / 2.0); });
  for (double c : {infinity, 2.0}) {
    Params const prm = unit_params(c, 4.0);
    EXPECT_EQ(scaling_path_energy(U0, 0.0, prm), 0.0);
    double const direct = report(U0, prm, true).action;
    EXPECT_NEAR(scaling_path_energy(U0, 1.0, prm), direct, 1e-12 * std::abs(direct));
    EXPECT_THROW(scaling_path_energy(U0, -0.1, prm), Error);
  }
}

TEST(ScalingPathEnergy, ExactOnRescaledGrid) {
  // t^2 U0(t x) sampled on the grid with spacing h/t has exactly the samples of U0 scaled by t^2,
  // so the discrete path energy must equal the discrete action there.
  auto profile = [](double r) { return std::exp(-r * r / 2.0) * (1.0 + 0.5 * r); };
  auto const g = make_grid(4000, 40.0);
  auto const U0 = RadialField::sample(g, profile);
  for (double c : {infinity, 2.0, 5.0})
    for (double t : {0.5, 1.4, 2.0}) {
      Params const prm = unit_params(c, 4.5);
      auto const fine = make_grid(4000, 40.0 / t);
      auto const gamma = RadialField::sample(fine, [&](double r) { return t * t * profile(t * r); });
      double const direct = report(gamma, prm, true).action;
      EXPECT_NEAR(scaling_path_energy(U0, t, prm), direct, 1e-10 * std::abs(direct)) << "c = " << c << " t = " << t;
    }
}

TEST(ScalingPathEnergy, ConvergesToActionOfDilatedField) {
  auto profile = [](double r) { return std::exp(-r * r / 2.0) * (1.0 + 0.5 * r); };
  Params const prm = unit_params(2.0, 4.5);
  double const t = 2.0;
  auto gap = [&](int n) {
    auto const g = make_grid(n, 40.0);
    auto const gamma = RadialField::sample(g, [&](double r) { return t * t * profile(t * r); });
    return scaling_path_energy(RadialField::sample(g, profile), t, prm) - report(gamma, prm, true).action;
  };
  double const e1 = gap(4000), e2 = gap(8000), e3 = gap(16000);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
  EXPECT_NEAR(e2 / e3, 4.0, 0.2);
}

TEST(ScalingPath, DerivativeMatchesFiniteDifference) {
  auto const g = make_grid(1000, 20.0);
  auto const U0 = exp_field(g, 1.5);
  ScalingPath const path(U0, unit_params(infinity, 4.0));
  for (double t : {0.3, 1.0, 2.5}) {
    double const dt = 1e-6;
    double const fd = (path.energy(t + dt) - path.energy(t - dt)) / (2.0 * dt);
    EXPECT_NEAR(path.nsp_derivative(t), fd, 1e-6 * (1.0 + std::abs(fd)));
  }
  double const G = action_nsp(U0, unit_params(infinity, 4.0), true).scaling_derivative;
  EXPECT_NEAR(path.nsp_derivative(1.0), G, 1e-10 * (1.0 + std::abs(G)));
}
