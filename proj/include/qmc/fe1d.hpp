#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace qmc {

// Piecewise-linear FE solution on the uniform mesh of (0,1) with homogeneous
// Dirichlet data: nodal values at the M-1 interior nodes, boundary values
// implicitly zero.
struct FESolution {
  double h = 0.0;
  std::vector<double> interior;

  int elements() const { return static_cast<int>(interior.size()) + 1; }
  double node(int i) const {  // i = 0..M, boundary included
    if (i <= 0 || i >= elements()) return 0.0;
    return interior[static_cast<std::size_t>(i - 1)];
  }
  // H^1_0 seminorm ||u'||_{L^2}
  double grad_norm() const {
    double acc = 0.0;
    const int m = elements();
    for (int e = 1; e <= m; ++e) {
      const double d = node(e) - node(e - 1);
      acc += d * d;
    }
    return std::sqrt(acc / h);
  }
};

namespace detail {

// 5-point Gauss-Legendre on [-1,1] from the closed forms; exact through
// degree 9, which covers polynomial data against the linear basis.
struct Gauss5 {
  double x[5];
  double w[5];
  Gauss5() {
    const double s70 = std::sqrt(70.0);
    const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    x[0] = -b; x[1] = -a; x[2] = 0.0; x[3] = a; x[4] = b;
    w[0] = w[4] = (322.0 - 13.0 * s70) / 900.0;
    w[1] = w[3] = (322.0 + 13.0 * s70) / 900.0;
    w[2] = 128.0 / 225.0;
  }
};

inline const Gauss5& gauss5() {
  static const Gauss5 g;
  return g;
}

}  // namespace detail

// Galerkin system for -(a u')' = f with the coefficient frozen at the element
// midpoints (one value per element); tridiagonal Thomas solve.
inline FESolution solve_tridiag(std::span<const double> a_elem,
                                const std::function<double(double)>& f) {
  const int m = static_cast<int>(a_elem.size());
  if (m < 2) throw std::invalid_argument("solve_tridiag: need at least 2 elements");
  for (double a : a_elem)
    if (!(a > 0.0))
      throw std::invalid_argument("solve_tridiag: nonpositive coefficient value");
  const double h = 1.0 / static_cast<double>(m);
  const int nn = m - 1;  // interior nodes
  std::vector<double> diag(static_cast<std::size_t>(nn)), lower(static_cast<std::size_t>(nn)),
      upper(static_cast<std::size_t>(nn)), rhs(static_cast<std::size_t>(nn), 0.0);
  for (int i = 1; i <= nn; ++i) {
    diag[static_cast<std::size_t>(i - 1)] =
        (a_elem[static_cast<std::size_t>(i - 1)] + a_elem[static_cast<std::size_t>(i)]) / h;
    upper[static_cast<std::size_t>(i - 1)] = -a_elem[static_cast<std::size_t>(i)] / h;
    lower[static_cast<std::size_t>(i - 1)] = -a_elem[static_cast<std::size_t>(i - 1)] / h;
  }
  // load integral f phi_i over the two adjacent elements, Gauss per element
  const auto& g5 = detail::gauss5();
  for (int e = 1; e <= m; ++e) {
    const double xl = (e - 1) * h, xr = e * h;
    double to_left = 0.0, to_right = 0.0;  // nodes e-1 and e
    for (int q = 0; q < 5; ++q) {
      const double x = 0.5 * (xl + xr) + 0.5 * h * g5.x[q];
      const double t = (x - xl) / h;  // phi_right = t, phi_left = 1 - t
      const double fv = f(x) * 0.5 * h * g5.w[q];
      to_left += fv * (1.0 - t);
      to_right += fv * t;
    }
    if (e - 1 >= 1) rhs[static_cast<std::size_t>(e - 2)] += to_left;
    if (e <= nn) rhs[static_cast<std::size_t>(e - 1)] += to_right;
  }
  // Thomas elimination
  std::vector<double> cp(static_cast<std::size_t>(nn)), dp(static_cast<std::size_t>(nn));
  cp[0] = upper[0] / diag[0];
  dp[0] = rhs[0] / diag[0];
  for (int i = 1; i < nn; ++i) {
    const double denom = diag[static_cast<std::size_t>(i)] -
                         lower[static_cast<std::size_t>(i)] * cp[static_cast<std::size_t>(i - 1)];
    if (denom == 0.0) throw std::runtime_error("solve_tridiag: singular system");
    cp[static_cast<std::size_t>(i)] = upper[static_cast<std::size_t>(i)] / denom;
    dp[static_cast<std::size_t>(i)] =
        (rhs[static_cast<std::size_t>(i)] -
         lower[static_cast<std::size_t>(i)] * dp[static_cast<std::size_t>(i - 1)]) /
        denom;
  }
  FESolution u;
  u.h = h;
  u.interior.assign(static_cast<std::size_t>(nn), 0.0);
  u.interior[static_cast<std::size_t>(nn - 1)] = dp[static_cast<std::size_t>(nn - 1)];
  for (int i = nn - 2; i >= 0; --i)
    u.interior[static_cast<std::size_t>(i)] =
        dp[static_cast<std::size_t>(i)] -
        cp[static_cast<std::size_t>(i)] * u.interior[static_cast<std::size_t>(i + 1)];
  return u;
}

// G(u_h) = int g u_h dx, Gauss per element against the linear interpolant;
// exact for polynomial g through degree 8.
inline double qoi(const FESolution& u, const std::function<double(double)>& g) {
  const auto& g5 = detail::gauss5();
  const int m = u.elements();
  const double h = u.h;
  double acc = 0.0;
  for (int e = 1; e <= m; ++e) {
    const double xl = (e - 1) * h;
    const double ul = u.node(e - 1), ur = u.node(e);
    double part = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double t = 0.5 + 0.5 * g5.x[q];
      const double x = xl + t * h;
      part += g5.w[q] * g(x) * (ul + t * (ur - ul));
    }
    acc += part * 0.5 * h;
  }
  return acc;
}

}  // namespace qmc
