#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "soliton/errors.hpp"

namespace soliton {

/// Tridiagonal matrix stored by diagonals; lower[0] and upper[size-1] are unused.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t size = 0) : lower(size, 0.0), diag(size, 0.0), upper(size, 0.0) {}

  std::size_t size() const noexcept { return diag.size(); }

  std::vector<double> apply(std::vector<double> const& x) const {
    std::size_t const n = size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += lower[i] * x[i - 1];
      if (i + 1 < n) s += upper[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }
};

/// Thomas algorithm without pivoting. Throws singular_system on a vanishing or non-finite pivot.
inline std::vector<double> solve_tridiagonal(Tridiagonal const& m, std::vector<double> rhs,
                                             std::string const& operation = "solve_tridiagonal") {
  std::size_t const n = m.size();
  if (rhs.size() != n) throw Error(ErrorKind::invalid_argument, operation, "rhs size mismatch");
  if (n == 0) return rhs;
  std::vector<double> c(n, 0.0);
  double pivot = m.diag[0];
  auto check = [&](double p, std::size_t row) {
    if (!std::isfinite(p) || std::abs(p) <= 1e-300)
      throw Error(ErrorKind::singular_system, operation, "zero pivot at row " + std::to_string(row));
  };
  check(pivot, 0);
  c[0] = n > 1 ? m.upper[0] / pivot : 0.0;
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = m.diag[i] - m.lower[i] * c[i - 1];
    check(pivot, i);
    c[i] = i + 1 < n ? m.upper[i] / pivot : 0.0;
    rhs[i] = (rhs[i] - m.lower[i] * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

using Block2 = std::array<double, 4>;  // row-major {a00, a01, a10, a11}
using Vec2 = std::array<double, 2>;

/// Block-tridiagonal system with 2x2 blocks, one block row per radial node.
struct BlockTridiagonal {
  std::vector<Block2> lower;
  std::vector<Block2> diag;
  std::vector<Block2> upper;

  explicit BlockTridiagonal(std::size_t size = 0)
      : lower(size, Block2{}), diag(size, Block2{}), upper(size, Block2{}) {}

  std::size_t size() const noexcept { return diag.size(); }
};

namespace detail {

inline Block2 mul(Block2 const& a, Block2 const& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
inline Vec2 mul(Block2 const& a, Vec2 const& x) {
  return {a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]};
}
inline Block2 sub(Block2 const& a, Block2 const& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

}  // namespace detail

/// Block Thomas elimination. Throws singular_system when a 2x2 pivot block is (numerically) singular.
inline std::vector<Vec2> solve_block_tridiagonal(BlockTridiagonal const& m, std::vector<Vec2> rhs,
                                                 std::string const& operation = "solve_block_tridiagonal") {
  std::size_t const n = m.size();
  if (rhs.size() != n) throw Error(ErrorKind::invalid_argument, operation, "rhs size mismatch");
  std::vector<Block2> c(n, Block2{});
  auto invert = [&](Block2 const& b, std::size_t row) {
    double const det = b[0] * b[3] - b[1] * b[2];
    double const scale = std::abs(b[0] * b[3]) + std::abs(b[1] * b[2]);
    if (!std::isfinite(det) || std::abs(det) <= 1e-14 * scale || scale == 0.0)
      throw Error(ErrorKind::singular_system, operation, "singular pivot block at node " + std::to_string(row));
    return Block2{b[3] / det, -b[1] / det, -b[2] / det, b[0] / det};
  };
  for (std::size_t i = 0; i < n; ++i) {
    Block2 pivot = m.diag[i];
    Vec2 r = rhs[i];
    if (i > 0) {
      pivot = detail::sub(pivot, detail::mul(m.lower[i], c[i - 1]));
      Vec2 const t = detail::mul(m.lower[i], rhs[i - 1]);
      r = {r[0] - t[0], r[1] - t[1]};
    }
    Block2 const inv = invert(pivot, i);
    if (i + 1 < n) c[i] = detail::mul(inv, m.upper[i]);
    rhs[i] = detail::mul(inv, r);
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    Vec2 const t = detail::mul(c[i], rhs[i + 1]);
    rhs[i] = {rhs[i][0] - t[0], rhs[i][1] - t[1]};
  }
  return rhs;
}

}  // namespace soliton
