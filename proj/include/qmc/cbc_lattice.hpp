#pragma once

#include "qmc/fft.hpp"
#include "qmc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

// Shift-averaged kernel of the unanchored Sobolev space.
inline double bernoulli2(double x) { return x * x - x + 1.0 / 6.0; }

struct GeneratingVector {
  std::uint64_t n = 0;
  std::vector<std::uint32_t> z;
  std::string meta;

  int dims() const { return static_cast<int>(z.size()); }
};

namespace detail {

inline bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct PrimePower {
  std::uint64_t p;
  int m;
};

inline PrimePower prime_power_split(std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("lattice: n must be at least 2");
  std::uint64_t p = 0;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      p = d;
      break;
    }
  if (p == 0) p = n;
  int m = 0;
  std::uint64_t r = n;
  while (r % p == 0) {
    r /= p;
    ++m;
  }
  if (r != 1)
    throw std::invalid_argument("lattice: n must be a prime power");
  return {p, m};
}

// Euler totient of p^m.
inline std::uint64_t phi_prime_power(std::uint64_t p, int m) {
  std::uint64_t phi = 1;
  for (int i = 1; i < m; ++i) phi *= p;
  return phi * (p - 1);
}

// Per-order accumulator state of the fast CBC recursion, kept in the scaled
// form Ptil[l][i] = Gamma_l * P_l(i) so that only the modest ratios
// Gamma_l/Gamma_{l-1} ever appear as multipliers.
struct CbcState {
  const PODWeights* weights = nullptr;
  std::uint64_t n = 0;
  bool product = false;
  std::vector<double> prod_acc;               // product weights: prod_j (1 + x_ij)
  std::vector<std::vector<double>> per_order;  // POD: Ptil[l][i], l = 0..dim
  int dim = 0;

  void init(std::uint64_t n_, const PODWeights& w) {
    weights = &w;
    n = n_;
    product = w.product_form();
    dim = 0;
    if (product) {
      prod_acc.assign(n, 1.0);
    } else {
      per_order.assign(1, std::vector<double>(n, 1.0));
    }
  }

  // w(i) = sum_{l=0..dim} (Gamma_{l+1}/Gamma_l) Ptil[l][i]; the candidate score
  // for the next component is T(z) = sum_i omega(iz mod n) w(i).
  std::vector<double> frontier() const {
    if (product) return prod_acc;
    std::vector<double> w(n, 0.0);
    for (int ell = 0; ell <= dim; ++ell) {
      const double ratio = weights->order_ratio(ell + 1);
      const auto& row = per_order[static_cast<std::size_t>(ell)];
      for (std::uint64_t i = 0; i < n; ++i) w[i] += ratio * row[i];
    }
    return w;
  }

  void absorb(const std::vector<double>& omega_of_z, double upsilon) {
    if (product) {
      for (std::uint64_t i = 0; i < n; ++i)
        prod_acc[i] *= 1.0 + upsilon * omega_of_z[i];
    } else {
      per_order.emplace_back(n, 0.0);
      for (int ell = dim + 1; ell >= 1; --ell) {
        const double ratio = weights->order_ratio(ell);
        auto& dst = per_order[static_cast<std::size_t>(ell)];
        const auto& src = per_order[static_cast<std::size_t>(ell - 1)];
        for (std::uint64_t i = 0; i < n; ++i)
          dst[i] += ratio * upsilon * omega_of_z[i] * src[i];
      }
    }
    ++dim;
  }

  double criterion() const {
    double acc = 0.0;
    if (product) {
      for (std::uint64_t i = 0; i < n; ++i) acc += prod_acc[i] - 1.0;
    } else {
      for (int ell = 1; ell <= dim; ++ell)
        for (std::uint64_t i = 0; i < n; ++i)
          acc += per_order[static_cast<std::size_t>(ell)][i];
    }
    return acc / static_cast<double>(n);
  }
};

// Score every odd candidate at once for n = 2^m.  The column index i is
// split as i = 2^t u with u odd; for fixed t the sum over u is a correlation
// on the unit group of Z/2^{m-t}, which factors as {+-1} x <5> with cyclic
// part of power-of-two order, so each level reduces to four length-2^{k-2}
// FFTs.  Total cost O(n log n) per component.
inline std::vector<double> score_candidates_pow2(int m, const std::vector<double>& omega,
                                                 const std::vector<double>& w) {
  const std::uint64_t n = std::uint64_t{1} << m;
  double base = omega[0] * w[0];
  if (m >= 1) base += omega[n / 2] * w[n / 2];
  std::vector<double> score(n / 2, base);  // index z>>1 for odd z

  for (int t = 0; t <= m - 2; ++t) {
    const int k = m - t;
    const std::uint64_t modk = std::uint64_t{1} << k;
    const std::size_t E = std::size_t{1} << (k - 2);
    // v(sigma, e) = (+-1) 5^e mod 2^k
    std::vector<std::uint32_t> val(2 * E);
    std::uint64_t p5 = 1;
    for (std::size_t e = 0; e < E; ++e) {
      val[e] = static_cast<std::uint32_t>(p5);
      val[E + e] = static_cast<std::uint32_t>(modk - p5);
      p5 = (p5 * 5) % modk;
    }
    std::vector<std::complex<double>> fhat[2], ghat[2];
    for (int sgn = 0; sgn < 2; ++sgn) {
      std::vector<std::complex<double>> f(E), g(E);
      for (std::size_t e = 0; e < E; ++e) {
        const std::uint64_t v = static_cast<std::uint64_t>(val[sgn * E + e]) << t;
        f[e] = omega[v];
        g[e] = w[v];
      }
      fft_pow2(f, false);
      fft_pow2(g, false);
      fhat[sgn] = std::move(f);
      ghat[sgn] = std::move(g);
    }
    for (int tau = 0; tau < 2; ++tau) {
      std::vector<std::complex<double>> shat(E);
      for (std::size_t q = 0; q < E; ++q)
        shat[q] = fhat[tau][q] * std::conj(ghat[0][q]) +
                  fhat[tau ^ 1][q] * std::conj(ghat[1][q]);
      fft_pow2(shat, true);
      for (std::size_t b = 0; b < E; ++b) {
        const double sval = shat[b].real();
        for (std::uint64_t z = val[static_cast<std::size_t>(tau) * E + b]; z < n; z += modk)
          score[z >> 1] += sval;
      }
    }
  }
  return score;
}

}  // namespace detail

// e^2_sh(z) = sum_{u != 0} gamma_u (1/n) sum_i prod_{j in u} B2({i z_j / n}),
// evaluated through the per-order recursion (no 2^s subset enumeration).
inline double shift_avg_wce_sq(const GeneratingVector& gv, const PODWeights& weights) {
  const int s = gv.dims();
  if (s == 0) return 0.0;
  if (weights.dims() < s)
    throw std::invalid_argument("shift_avg_wce_sq: weight system shorter than the vector");
  const std::uint64_t n = gv.n == 0 ? 1 : gv.n;
  std::vector<double> scaled(static_cast<std::size_t>(s) + 1, 0.0);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    scaled.assign(static_cast<std::size_t>(s) + 1, 0.0);
    scaled[0] = 1.0;
    for (int j = 1; j <= s; ++j) {
      const std::uint64_t rem =
          (i * static_cast<std::uint64_t>(gv.z[static_cast<std::size_t>(j - 1)])) % n;
      const double x = weights.dim_factors[static_cast<std::size_t>(j - 1)] *
                       bernoulli2(static_cast<double>(rem) / static_cast<double>(n));
      for (int ell = j; ell >= 1; --ell)
        scaled[static_cast<std::size_t>(ell)] +=
            weights.order_ratio(ell) * x * scaled[static_cast<std::size_t>(ell - 1)];
    }
    for (int ell = 1; ell <= s; ++ell) acc += scaled[static_cast<std::size_t>(ell)];
  }
  return acc / static_cast<double>(n);
}

// Component-by-component construction minimizing shift_avg_wce_sq.  For
// n = 2^m the per-component candidate scores come from the group-FFT
// transform (O(s n log n + s^2 n) for POD weights, O(s n log n) for product
// weights); odd prime powers fall back to direct scoring over the unit group.
// Near-ties (within 1e-12 of the minimum, relative) resolve to the smallest
// candidate.
inline GeneratingVector cbc_construct(std::uint64_t n, int s, const PODWeights& weights) {
  if (s <= 0) throw std::invalid_argument("cbc_construct: s must be positive");
  if (weights.dims() < s)
    throw std::invalid_argument("cbc_construct: weight system shorter than s");
  GeneratingVector gv;
  gv.n = n;
  if (n == 1) {  // single-point rule; every component is equivalent
    gv.z.assign(static_cast<std::size_t>(s), 1);
    return gv;
  }
  const auto [p, m] = detail::prime_power_split(n);

  std::vector<double> omega(n);
  for (std::uint64_t k = 0; k < n; ++k)
    omega[k] = bernoulli2(static_cast<double>(k) / static_cast<double>(n));

  std::vector<std::uint32_t> candidates;
  if (p != 2) {
    candidates.reserve(detail::phi_prime_power(p, m));
    for (std::uint64_t z = 1; z < n; ++z)
      if (z % p != 0) candidates.push_back(static_cast<std::uint32_t>(z));
  }

  detail::CbcState state;
  state.init(n, weights);
  std::vector<double> omega_of_z(n);

  for (int j = 1; j <= s; ++j) {
    const double upsilon = weights.dim_factors[static_cast<std::size_t>(j - 1)];
    std::uint32_t chosen = 1;
    if (j > 1) {  // in one dimension every admissible z yields the same point set
      const std::vector<double> w = state.frontier();
      std::vector<double> score;
      if (p == 2) {
        score = detail::score_candidates_pow2(m, omega, w);
      } else {
        score.resize(candidates.size());
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          double acc = 0.0;
          for (std::uint64_t i = 0; i < n; ++i)
            acc += omega[(i * candidates[c]) % n] * w[i];
          score[c] = acc;
        }
      }
      double vmin = std::numeric_limits<double>::infinity();
      double vmax = -vmin;
      for (double v : score) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      const double tol = 1e-12 * std::max({std::abs(vmin), std::abs(vmax), 1e-300});
      for (std::size_t c = 0; c < score.size(); ++c)
        if (score[c] <= vmin + tol) {
          chosen = p == 2 ? static_cast<std::uint32_t>(2 * c + 1) : candidates[c];
          break;
        }
    }
    gv.z.push_back(chosen);
    for (std::uint64_t i = 0; i < n; ++i)
      omega_of_z[i] = omega[(i * chosen) % n];
    state.absorb(omega_of_z, upsilon);
  }

  std::ostringstream meta;
  meta.setf(std::ios::scientific);
  meta.precision(12);
  meta << (state.product ? "product" : "pod") << " weights, lambda=" << weights.lambda
       << ", s=" << s << ", n=" << n << ", criterion=" << state.criterion();
  gv.meta = meta.str();
  return gv;
}

// Plain CBC at the largest point count; the lattice-sequence generator reuses
// the same vector for every n = 2^k, k <= m_max, at the cost of a larger
// implied constant.
inline GeneratingVector construct_embedded(int m_max, int s, const PODWeights& weights) {
  if (m_max < 0 || m_max > 62)
    throw std::invalid_argument("construct_embedded: m_max out of range");
  return cbc_construct(std::uint64_t{1} << m_max, s, weights);
}

// (1/sqrt(r)) ((2/n) sum_{u != 0} gamma_u^lambda rho(lambda)^{|u|})^{1/(2 lambda)}
// with the u-sum collapsed to a per-order recursion.
inline double theorem1_bound(const PODWeights& weights, std::uint64_t n, double lambda,
                             int r) {
  check_lambda_range(lambda, "theorem1_bound");
  if (r < 1) throw std::invalid_argument("theorem1_bound: r must be >= 1");
  if (n < 1) throw std::invalid_argument("theorem1_bound: n must be >= 1");
  const double rho = rho_lattice(lambda);
  const int s = weights.dims();
  // Etil_l = Gamma_l^lambda e_l(x_1..x_j) with x_j = Upsilon_j^lambda rho
  std::vector<double> scaled(static_cast<std::size_t>(s) + 1, 0.0);
  scaled[0] = 1.0;
  for (int j = 1; j <= s; ++j) {
    const double x = std::pow(weights.dim_factors[static_cast<std::size_t>(j - 1)], lambda) * rho;
    for (int ell = j; ell >= 1; --ell) {
      const double ratio = std::exp(lambda * (weights.log_order_factor(ell) -
                                              weights.log_order_factor(ell - 1)));
      scaled[static_cast<std::size_t>(ell)] += ratio * x * scaled[static_cast<std::size_t>(ell - 1)];
    }
  }
  double sum = 0.0;
  for (int ell = 1; ell <= s; ++ell) sum += scaled[static_cast<std::size_t>(ell)];
  return std::pow(2.0 / static_cast<double>(n) * sum, 1.0 / (2.0 * lambda)) /
         std::sqrt(static_cast<double>(r));
}

}  // namespace qmc
