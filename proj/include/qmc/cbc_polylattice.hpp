#pragma once

#include "qmc/gf2.hpp"
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

// Interlaced polynomial lattice rule: modulus P of degree m, generating
// polynomials z_1..z_{alpha s}, Hankel matrices C_j of the expansions z_j/P,
// and the row-interlaced matrices B_d driving point generation.
struct DigitalRule {
  int m = 0;
  int alpha = 1;
  BinaryPolynomial modulus;
  std::vector<BinaryPolynomial> gen;
  std::vector<GF2Matrix> C;
  std::vector<GF2Matrix> B;
  int precision_bits = 0;   // rows kept in B (min(alpha*m, 64))
  bool truncated = false;   // true when alpha*m exceeded the 64-row budget
  std::string meta;

  int dims() const { return static_cast<int>(B.size()); }
  std::uint64_t points() const { return std::uint64_t{1} << m; }
};

namespace detail {

// Row-interlace with a row cap, for the alpha*m > 64 case where only the
// leading digits can be rendered.
inline std::vector<GF2Matrix> interlace_matrices_capped(std::span<const GF2Matrix> cs,
                                                        int alpha, int max_rows) {
  const int m = cs.empty() ? 0 : cs[0].rows;
  const int rows = std::min(alpha * m, max_rows);
  const int s = static_cast<int>(cs.size()) / alpha;
  std::vector<GF2Matrix> bs;
  bs.reserve(static_cast<std::size_t>(s));
  for (int d = 1; d <= s; ++d) {
    GF2Matrix b = GF2Matrix::zeros(rows, m);
    for (int r = 1; r <= rows; ++r) {
      const int src_row = (r - 1) / alpha + 1;
      const int src_idx = alpha * (d - 1) + (r - 1) % alpha;
      for (int t = 1; t <= m; ++t)
        b.set(r, t, cs[static_cast<std::size_t>(src_idx)].get(src_row, t));
    }
    bs.push_back(std::move(b));
  }
  return bs;
}

}  // namespace detail

// Per-coordinate kernel of the CBC quality criterion for interlaced rules.
// Digit p of underlying coordinate a (within a block of alpha) lands at
// interlaced position alpha(p-1)+a, which gives the digit-separable form
//   omega_a(x) = tail_a * prod_{p=1..m} (1 + 2^-(alpha(p-1)+a) (-1)^{x_p}) - 1,
// with tail_a the analytic product over the digits beyond m.  Returned as a
// table over all 2^m fixed-point states (bit k = digit k+1).
inline std::vector<double> interlaced_kernel_table(int m, int alpha, int a) {
  if (m < 1 || m > 26) throw std::invalid_argument("interlaced_kernel_table: bad m");
  if (alpha < 1 || a < 1 || a > alpha)
    throw std::invalid_argument("interlaced_kernel_table: bad interlacing indices");
  std::vector<double> coeff(static_cast<std::size_t>(m));
  for (int p = 1; p <= m; ++p)
    coeff[static_cast<std::size_t>(p - 1)] =
        std::ldexp(1.0, -(alpha * (p - 1) + a));
  double tail = 1.0;
  for (int p = m + 1; p <= m + 80; ++p) {
    const double c = std::ldexp(1.0, -(alpha * (p - 1) + a));
    if (c < 1e-20) break;
    tail *= 1.0 + c;
  }
  const std::uint64_t n = std::uint64_t{1} << m;
  std::vector<double> table(n);
  table[0] = tail;
  // grow the table one digit at a time: states with digit p set pick up the
  // factor (1-c_p) instead of (1+c_p)
  for (int p = 1; p <= m; ++p) {
    const double c = coeff[static_cast<std::size_t>(p - 1)];
    const std::uint64_t half = std::uint64_t{1} << (p - 1);
    for (std::uint64_t v = 0; v < half; ++v) {
      table[v + half] = table[v] * (1.0 - c);
      table[v] *= 1.0 + c;
    }
  }
  for (std::uint64_t v = 0; v < n; ++v) table[v] -= 1.0;
  return table;
}

namespace detail {

// Hankel columns of z/P in the fixed-point column encoding.
inline std::vector<std::uint64_t> hankel_columns(BinaryPolynomial z, BinaryPolynomial P,
                                                 int m) {
  const auto a = laurent_expansion(z, P, 2 * m - 1);
  std::vector<std::uint64_t> cols(static_cast<std::size_t>(m), 0);
  for (int t = 1; t <= m; ++t) {
    std::uint64_t c = 0;
    for (int r = 1; r <= m; ++r)
      if (a[static_cast<std::size_t>(r + t - 2)]) c |= std::uint64_t{1} << (r - 1);
    cols[static_cast<std::size_t>(t - 1)] = c;
  }
  return cols;
}

// sum_i kernel[x_i(z)] * weight[i] via the Gray-code walk of the candidate's
// Hankel matrix; O(n) per candidate.
inline double gray_weighted_kernel_sum(const std::vector<std::uint64_t>& cols,
                                       const std::vector<double>& kernel,
                                       const std::vector<double>& weight, int m) {
  const std::uint64_t n = std::uint64_t{1} << m;
  std::uint64_t state = 0;
  double acc = kernel[0] * weight[0];
  for (std::uint64_t t = 1; t < n; ++t) {
    state ^= cols[static_cast<std::size_t>(std::countr_zero(t))];
    acc += kernel[state] * weight[t ^ (t >> 1)];
  }
  return acc;
}

// Multiply the per-point block product by (1 + omega_a(x_i(z))), indexed by
// the natural point index.
inline void gray_multiply_block(const std::vector<std::uint64_t>& cols,
                                const std::vector<double>& kernel,
                                std::vector<double>& block, int m) {
  const std::uint64_t n = std::uint64_t{1} << m;
  std::uint64_t state = 0;
  block[0] *= 1.0 + kernel[0];
  for (std::uint64_t t = 1; t < n; ++t) {
    state ^= cols[static_cast<std::size_t>(std::countr_zero(t))];
    block[t ^ (t >> 1)] *= 1.0 + kernel[state];
  }
}

}  // namespace detail

// Assemble a DigitalRule (Hankel + interlaced matrices) from chosen
// generating polynomials.
inline DigitalRule make_digital_rule(BinaryPolynomial modulus,
                                     std::vector<BinaryPolynomial> gens, int alpha) {
  const int m = modulus.degree();
  if (m < 1 || m > 32) throw std::invalid_argument("make_digital_rule: bad modulus degree");
  if (!modulus.irreducible())
    throw std::invalid_argument("make_digital_rule: modulus must be irreducible");
  if (alpha < 1) throw std::invalid_argument("make_digital_rule: alpha must be >= 1");
  if (gens.empty() || gens.size() % static_cast<std::size_t>(alpha) != 0)
    throw std::invalid_argument("make_digital_rule: generator count must be a multiple of alpha");
  DigitalRule rule;
  rule.m = m;
  rule.alpha = alpha;
  rule.modulus = modulus;
  rule.gen = std::move(gens);
  rule.C.reserve(rule.gen.size());
  for (auto z : rule.gen) rule.C.push_back(hankel_matrix(z, modulus, m));
  rule.truncated = alpha * m > 64;
  rule.precision_bits = std::min(alpha * m, 64);
  rule.B = detail::interlace_matrices_capped(rule.C, alpha, 64);
  return rule;
}

// CBC construction of the generating polynomials of an interlaced polynomial
// lattice rule under SPOD weights.  Candidates are all nonzero polynomials of
// degree < m (automatically coprime to the irreducible modulus); each is
// scored in O(n) through a per-point multiplicative state; near-ties (1e-12
// relative) resolve to the smallest polynomial.
inline DigitalRule cbc_construct_interlaced(int m, int s, int alpha,
                                            const SPODWeights& weights,
                                            BinaryPolynomial modulus = {0}) {
  if (m < 1 || m > 26) throw std::invalid_argument("cbc_construct_interlaced: bad m");
  if (s < 1) throw std::invalid_argument("cbc_construct_interlaced: s must be positive");
  if (alpha < 2) throw std::invalid_argument("cbc_construct_interlaced: alpha must be >= 2");
  if (weights.alpha != alpha)
    throw std::invalid_argument("cbc_construct_interlaced: weights built for another alpha");
  if (weights.dims() < s)
    throw std::invalid_argument("cbc_construct_interlaced: weight system shorter than s");
  if (modulus.zero()) modulus = default_modulus(m);
  if (modulus.degree() != m || !modulus.irreducible())
    throw std::invalid_argument("cbc_construct_interlaced: modulus must be irreducible of degree m");

  const std::uint64_t n = std::uint64_t{1} << m;
  std::vector<std::vector<double>> kernel(static_cast<std::size_t>(alpha));
  for (int a = 1; a <= alpha; ++a)
    kernel[static_cast<std::size_t>(a - 1)] = interlaced_kernel_table(m, alpha, a);

  // Ptil[q][i] = Gamma_q * (sum over completed blocks/nu with |nu| = q of
  // prod Upsilon_j(nu_j) phi_j(i)); block_part carries the open block.
  std::vector<std::vector<double>> per_degree(1, std::vector<double>(n, 1.0));
  std::vector<double> block_part(n, 1.0);
  std::vector<double> block_mult(n, 0.0);  // M(i) for the current block
  std::vector<double> bm(n);
  std::vector<BinaryPolynomial> gens;
  gens.reserve(static_cast<std::size_t>(alpha) * static_cast<std::size_t>(s));

  for (int j = 1; j <= s; ++j) {
    // M(i) = sum_nu Upsilon_j(nu) (Gamma_{q+nu}/Gamma_q) Ptil[q][i]
    std::fill(block_mult.begin(), block_mult.end(), 0.0);
    const int qmax = alpha * (j - 1);
    for (int nu = 1; nu <= alpha; ++nu) {
      const double ups = weights.upsilon(j, nu);
      for (int q = 0; q <= qmax; ++q) {
        const double ratio = weights.order_ratio_step(q, nu);
        const auto& row = per_degree[static_cast<std::size_t>(q)];
        for (std::uint64_t i = 0; i < n; ++i) block_mult[i] += ups * ratio * row[i];
      }
    }
    std::fill(block_part.begin(), block_part.end(), 1.0);

    for (int a = 1; a <= alpha; ++a) {
      const auto& ker = kernel[static_cast<std::size_t>(a - 1)];
      BinaryPolynomial chosen{1};
      if (!(j == 1 && a == 1)) {  // first slot: all candidates give the full point set
        for (std::uint64_t i = 0; i < n; ++i) bm[i] = block_part[i] * block_mult[i];
        double vmin = std::numeric_limits<double>::infinity();
        double vmax = -vmin;
        std::vector<double> score(n - 1);
        for (std::uint64_t zm = 1; zm < n; ++zm) {
          const auto cols = detail::hankel_columns({zm}, modulus, m);
          const double v = detail::gray_weighted_kernel_sum(cols, ker, bm, m);
          score[zm - 1] = v;
          vmin = std::min(vmin, v);
          vmax = std::max(vmax, v);
        }
        const double tol = 1e-12 * std::max({std::abs(vmin), std::abs(vmax), 1e-300});
        for (std::uint64_t zm = 1; zm < n; ++zm)
          if (score[zm - 1] <= vmin + tol) {
            chosen = BinaryPolynomial{zm};
            break;
          }
      }
      gens.push_back(chosen);
      const auto cols = detail::hankel_columns(chosen, modulus, m);
      detail::gray_multiply_block(cols, ker, block_part, m);
    }

    // fold the completed block into the per-degree accumulators
    for (int q = 0; q < alpha; ++q) per_degree.emplace_back(n, 0.0);
    for (int q = alpha * j; q >= 1; --q) {
      auto& dst = per_degree[static_cast<std::size_t>(q)];
      for (int nu = 1; nu <= std::min(alpha, q); ++nu) {
        const double ups = weights.upsilon(j, nu);
        const double ratio = weights.order_ratio_step(q - nu, nu);
        const auto& src = per_degree[static_cast<std::size_t>(q - nu)];
        for (std::uint64_t i = 0; i < n; ++i)
          dst[i] += ups * ratio * (block_part[i] - 1.0) * src[i];
      }
    }
  }

  double crit = 0.0;
  for (int q = 1; q <= alpha * s; ++q)
    for (std::uint64_t i = 0; i < n; ++i)
      crit += per_degree[static_cast<std::size_t>(q)][i];
  crit /= static_cast<double>(n);

  DigitalRule rule = make_digital_rule(modulus, std::move(gens), alpha);
  std::ostringstream meta;
  meta.setf(std::ios::scientific);
  meta.precision(12);
  meta << "spod weights, alpha=" << alpha << ", s=" << s << ", m=" << m
       << ", modulus=0x" << std::hex << modulus.mask << std::dec
       << ", criterion=" << crit;
  rule.meta = meta.str();
  return rule;
}

// Direct evaluation of the interlaced CBC quality criterion for a finished
// rule (used by the file round-trip checks; cost O(alpha^2 s^2 n)).
inline double interlaced_criterion(const DigitalRule& rule, const SPODWeights& weights) {
  const int s = rule.dims();
  const int m = rule.m;
  const int alpha = rule.alpha;
  if (weights.dims() < s || weights.alpha != alpha)
    throw std::invalid_argument("interlaced_criterion: weight system mismatch");
  const std::uint64_t n = rule.points();
  std::vector<std::vector<double>> per_degree(1, std::vector<double>(n, 1.0));
  std::vector<double> block(n);
  for (int j = 1; j <= s; ++j) {
    std::fill(block.begin(), block.end(), 1.0);
    for (int a = 1; a <= alpha; ++a) {
      const auto ker = interlaced_kernel_table(m, alpha, a);
      const auto cols = detail::hankel_columns(rule.gen[static_cast<std::size_t>(alpha * (j - 1) + a - 1)],
                                               rule.modulus, m);
      detail::gray_multiply_block(cols, ker, block, m);
    }
    for (int q = 0; q < alpha; ++q) per_degree.emplace_back(n, 0.0);
    for (int q = alpha * j; q >= 1; --q) {
      auto& dst = per_degree[static_cast<std::size_t>(q)];
      for (int nu = 1; nu <= std::min(alpha, q); ++nu) {
        const double ups = weights.upsilon(j, nu);
        const double ratio = weights.order_ratio_step(q - nu, nu);
        const auto& src = per_degree[static_cast<std::size_t>(q - nu)];
        for (std::uint64_t i = 0; i < n; ++i)
          dst[i] += ups * ratio * (block[i] - 1.0) * src[i];
      }
    }
  }
  double crit = 0.0;
  for (int q = 1; q <= alpha * s; ++q)
    for (std::uint64_t i = 0; i < n; ++i)
      crit += per_degree[static_cast<std::size_t>(q)][i];
  return crit / static_cast<double>(n);
}

// Recover the generating polynomial from a Hankel generating matrix: the
// first column holds the expansion digits a_1..a_m, and z = (P * A) >> m with
// A = sum_l a_l x^{m-l}.
inline BinaryPolynomial generator_from_matrix(const GF2Matrix& c, BinaryPolynomial P) {
  const int m = P.degree();
  if (c.cols < m) throw std::invalid_argument("generator_from_matrix: matrix too small");
  BinaryPolynomial acc{0};
  for (int l = 1; l <= m; ++l)
    if ((c.col[0] >> (l - 1)) & 1) acc = acc ^ BinaryPolynomial::x_pow(m - l);
  return BinaryPolynomial{(P * acc).mask >> m};
}

// ((2/n) sum_{u != 0} gamma_u^lambda rho_alpha(lambda)^{|u|})^{1/lambda} with
// the u-sum collapsed to a recursion over the total smoothness degree.  For
// lambda < 1 the SPOD power is expanded subadditively, matching the bound's
// derivation.
inline double theorem3_bound(const SPODWeights& weights, std::uint64_t n, double lambda) {
  const int alpha = weights.alpha;
  if (!(lambda > 1.0 / alpha && lambda <= 1.0))
    throw std::domain_error("theorem3_bound: lambda must lie in (1/alpha, 1]");
  if (n < 1) throw std::invalid_argument("theorem3_bound: n must be >= 1");
  const double rho = rho_interlaced(alpha, lambda);
  const int s = weights.dims();
  const int qmax = alpha * s;
  std::vector<double> scaled(static_cast<std::size_t>(qmax) + 1, 0.0);
  scaled[0] = 1.0;
  for (int j = 1; j <= s; ++j) {
    for (int q = std::min(qmax, alpha * j); q >= 1; --q) {
      double add = 0.0;
      for (int nu = 1; nu <= std::min(alpha, q); ++nu) {
        const double ratio = std::exp(lambda * (weights.log_order_factor(q) -
                                                weights.log_order_factor(q - nu)));
        add += ratio * std::pow(weights.upsilon(j, nu), lambda) * rho *
               scaled[static_cast<std::size_t>(q - nu)];
      }
      scaled[static_cast<std::size_t>(q)] += add;
    }
  }
  double sum = 0.0;
  for (int q = 1; q <= qmax; ++q) sum += scaled[static_cast<std::size_t>(q)];
  return std::pow(2.0 / static_cast<double>(n) * sum, 1.0 / lambda);
}

}  // namespace qmc
