#pragma once

// Radial meshes, quadrature, differential operators and norms for radially
// symmetric functions on R^3. A field is sampled at r_j = j h, j = 0..n, and
// is taken to vanish for r > r_max.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "soliton/errors.hpp"
#include "soliton/tridiagonal.hpp"

namespace soliton {

inline constexpr double four_pi = 4.0 * std::numbers::pi;

class RadialGrid {
 public:
  static constexpr int min_nodes = 16;

  RadialGrid(int n, double r_max) : n_(n), r_max_(r_max), h_(r_max / n) {
    if (n < min_nodes)
      throw Error(ErrorKind::configuration, "make_grid", "node count n = " + std::to_string(n) + " must be >= 16");
    if (!(r_max > 0.0) || !std::isfinite(r_max))
      throw Error(ErrorKind::configuration, "make_grid", "r_max must be positive and finite");
  }

  int n() const noexcept { return n_; }
  double r_max() const noexcept { return r_max_; }
  double h() const noexcept { return h_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) + 1; }
  double r(std::size_t j) const noexcept {
    return j == static_cast<std::size_t>(n_) ? r_max_ : static_cast<double>(j) * h_;
  }

  friend bool operator==(RadialGrid const& a, RadialGrid const& b) noexcept {
    return a.n_ == b.n_ && a.r_max_ == b.r_max_;
  }

 private:
  int n_;
  double r_max_;
  double h_;
};

inline RadialGrid make_grid(int n, double r_max) { return RadialGrid(n, r_max); }

/// Nodal samples of a radial function on a grid.
class RadialField {
 public:
  explicit RadialField(RadialGrid const& grid) : grid_(grid), values_(grid.size(), 0.0) {}

  RadialField(RadialGrid const& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw Error(ErrorKind::invalid_argument, "RadialField",
                  "expected " + std::to_string(grid_.size()) + " values, got " + std::to_string(values_.size()));
    for (double v : values_)
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "RadialField", "non-finite sample");
  }

  template <class F>
  static RadialField sample(RadialGrid const& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.r(j));
    return RadialField(grid, std::move(v));
  }

  RadialGrid const& grid() const noexcept { return grid_; }
  std::span<double const> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  std::vector<double> const& data() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& operator[](std::size_t j) noexcept { return values_[j]; }

  RadialField& operator+=(RadialField const& o) {
    for (std::size_t j = 0; j < size(); ++j) values_[j] += o.values_[j];
    return *this;
  }
  RadialField& operator-=(RadialField const& o) {
    for (std::size_t j = 0; j < size(); ++j) values_[j] -= o.values_[j];
    return *this;
  }
  RadialField& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  friend RadialField operator+(RadialField a, RadialField const& b) { return a += b; }
  friend RadialField operator-(RadialField a, RadialField const& b) { return a -= b; }
  friend RadialField operator*(double s, RadialField a) { return a *= s; }

 private:
  RadialGrid grid_;
  std::vector<double> values_;
};

/// Trapezoid weights of 4 pi int f(r) r^2 dr. The weight at r = 0 vanishes.
inline std::vector<double> quadrature_weights(RadialGrid const& g) {
  std::vector<double> w(g.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = four_pi * g.r(j) * g.r(j) * g.h();
  w.back() *= 0.5;
  return w;
}

/// 4 pi int_0^{r_max} f(r) r^2 dr, composite trapezoid.
inline double integrate_r3(RadialField const& f) {
  auto const& g = f.grid();
  double s = 0.0;
  for (std::size_t j = 1; j < g.size(); ++j) {
    double const r = g.r(j);
    s += (j + 1 == g.size() ? 0.5 : 1.0) * f[j] * r * r;
  }
  return four_pi * g.h() * s;
}

inline double inner(RadialField const& f, RadialField const& g) {
  auto const& grid = f.grid();
  double s = 0.0;
  for (std::size_t j = 1; j < grid.size(); ++j) {
    double const r = grid.r(j);
    s += (j + 1 == grid.size() ? 0.5 : 1.0) * f[j] * g[j] * r * r;
  }
  return four_pi * grid.h() * s;
}

/// Delta u: 3-point stencil inside, 6(u1-u0)/h^2 at r = 0, ghost value 0 beyond r_max.
inline RadialField laplacian_radial(RadialField const& u) {
  auto const& g = u.grid();
  std::size_t const n = static_cast<std::size_t>(g.n());
  double const h = g.h();
  double const h2 = h * h;
  RadialField out(g);
  out[0] = 6.0 * (u[1] - u[0]) / h2;
  for (std::size_t j = 1; j <= n; ++j) {
    double const up = j < n ? u[j + 1] : 0.0;
    double const r = g.r(j);
    out[j] = (up - 2.0 * u[j] + u[j - 1]) / h2 + (up - u[j - 1]) / (r * h);
  }
  return out;
}

/// Flux-form Dirichlet energy int |u'|^2 dx = sum_j 4 pi r_j r_{j+1} (u_{j+1}-u_j)^2 / h,
/// including the ghost link to the zero value beyond r_max. Paired with trapezoid weights its
/// first variation is exactly -laplacian_radial at nodes 1..n.
inline double dirichlet_energy(RadialField const& u) {
  auto const& g = u.grid();
  std::size_t const n = static_cast<std::size_t>(g.n());
  double const h = g.h();
  double s = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double const d = u[j + 1] - u[j];
    s += g.r(j) * g.r(j + 1) * d * d;
  }
  s += g.r_max() * (g.r_max() + h) * u[n] * u[n];
  return four_pi * s / h;
}

enum class OuterBoundary {
  dirichlet,  // value pinned to 0 at r_max
  monopole    // Phi'(r_max) = -Phi(r_max)/r_max, matching the exterior harmonic field A/r
};

/// Strong-form matrix of -Delta on nodes 0..n. Rows 1..n-1 are the 3-point stencil (flux form),
/// row 0 the symmetry stencil. For Dirichlet the last row pins the value; for the monopole
/// condition the last row is the half-cell flux balance including the exterior energy 4 pi R Phi^2.
inline Tridiagonal negative_laplacian(RadialGrid const& g, OuterBoundary bc) {
  std::size_t const n = static_cast<std::size_t>(g.n());
  double const h = g.h();
  Tridiagonal t(n + 1);
  t.diag[0] = 6.0 / (h * h);
  t.upper[0] = -6.0 / (h * h);
  for (std::size_t j = 1; j < n; ++j) {
    double const r = g.r(j);
    double const lo = g.r(j - 1) / (r * h * h);
    double const up = g.r(j + 1) / (r * h * h);
    t.lower[j] = -lo;
    t.upper[j] = -up;
    t.diag[j] = lo + up;
  }
  if (bc == OuterBoundary::dirichlet) {
    t.diag[n] = 1.0;
  } else {
    double const R = g.r_max();
    double const w = 0.5 * R * R * h;  // half-cell weight / (4 pi)
    double const k = g.r(n - 1) * R / h;
    t.lower[n] = -k / w;
    t.diag[n] = (k + R) / w;
  }
  return t;
}

struct Norms {
  double L2 = 0.0;
  double Lp = 0.0;
  double p = 2.0;
  double H1 = 0.0;
  double D12 = 0.0;
  double Linf = 0.0;
};

/// Fourth-order central differences inside (even reflection u_{-1} = u_1 at node 1, second order
/// at node n-1), one-sided at both ends.
inline RadialField radial_derivative(RadialField const& u) {
  auto const& g = u.grid();
  std::size_t const n = static_cast<std::size_t>(g.n());
  double const h = g.h();
  RadialField d(g);
  d[0] = (u[1] - u[0]) / h;
  d[1] = (-u[3] + 8.0 * u[2] - 8.0 * u[0] + u[1]) / (12.0 * h);
  for (std::size_t j = 2; j + 1 < n; ++j)
    d[j] = (-u[j + 2] + 8.0 * u[j + 1] - 8.0 * u[j - 1] + u[j - 2]) / (12.0 * h);
  d[n - 1] = (u[n] - u[n - 2]) / (2.0 * h);
  d[n] = (u[n] - u[n - 1]) / h;
  return d;
}

inline Norms norms(RadialField const& u, double p = 2.0) {
  if (!(p >= 2.0 && p <= 6.0))
    throw Error(ErrorKind::invalid_argument, "norms", "exponent p = " + std::to_string(p) + " outside [2, 6]");
  Norms out;
  out.p = p;
  auto const& g = u.grid();
  RadialField sq(g), pw(g), du2(g);
  RadialField const du = radial_derivative(u);
  for (std::size_t j = 0; j < g.size(); ++j) {
    double const a = std::abs(u[j]);
    sq[j] = a * a;
    pw[j] = std::pow(a, p);
    du2[j] = du[j] * du[j];
    out.Linf = std::max(out.Linf, a);
  }
  double const l2sq = integrate_r3(sq);
  double const d12sq = integrate_r3(du2);
  out.L2 = std::sqrt(l2sq);
  out.Lp = std::pow(integrate_r3(pw), 1.0 / p);
  out.D12 = std::sqrt(d12sq);
  out.H1 = std::sqrt(d12sq + l2sq);
  return out;
}

inline double h1_norm(RadialField const& u) { return norms(u).H1; }
inline double h1_distance(RadialField const& a, RadialField const& b) { return h1_norm(a - b); }

/// Natural-clamped cubic spline through nodal values with u'(0) = 0 (even symmetry) and u'(r_max)
/// estimated one-sidedly; evaluated at arbitrary radii, zero beyond r_max.
class RadialSpline {
 public:
  explicit RadialSpline(RadialField const& u) : grid_(u.grid()), y_(u.data()), m_(u.size(), 0.0) {
    std::size_t const n = y_.size();
    double const h = grid_.h();
    // Second-derivative moments, clamped end conditions.
    Tridiagonal t(n);
    std::vector<double> rhs(n, 0.0);
    double const d0 = 0.0;
    double const dn = (y_[n - 1] - y_[n - 2]) / h;
    t.diag[0] = 2.0;
    t.upper[0] = 1.0;
    rhs[0] = 6.0 / h * ((y_[1] - y_[0]) / h - d0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      t.lower[i] = 1.0;
      t.diag[i] = 4.0;
      t.upper[i] = 1.0;
      rhs[i] = 6.0 / (h * h) * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]);
    }
    t.lower[n - 1] = 1.0;
    t.diag[n - 1] = 2.0;
    rhs[n - 1] = 6.0 / h * (dn - (y_[n - 1] - y_[n - 2]) / h);
    m_ = solve_tridiagonal(t, std::move(rhs), "RadialSpline");
  }

  double operator()(double r) const {
    r = std::abs(r);
    if (r > grid_.r_max()) return 0.0;
    double const h = grid_.h();
    std::size_t i = std::min(static_cast<std::size_t>(r / h), y_.size() - 2);
    double const a = (grid_.r(i + 1) - r) / h;
    double const b = 1.0 - a;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }

 private:
  RadialGrid grid_;
  std::vector<double> y_;
  std::vector<double> m_;
};

/// Samples s * u(t r) on the same grid (cubic spline interpolation).
inline RadialField dilate(RadialField const& u, double t, double s) {
  RadialSpline const spline(u);
  auto const& g = u.grid();
  RadialField out(g);
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = s * spline(t * g.r(j));
  return out;
}

}  // namespace soliton
