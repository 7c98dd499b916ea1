#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace qmc {

using bigint = boost::multiprecision::cpp_int;

// Lambda_0 = 1, Lambda_n = sum_{i<n} C(n,i) Lambda_i (the ordered Bell
// numbers).  Exact; they outgrow 64 bits near n = 25.
inline std::vector<bigint> fubini_numbers(int n_max) {
  if (n_max < 0) throw std::invalid_argument("fubini_numbers: n_max must be >= 0");
  std::vector<bigint> lam(static_cast<std::size_t>(n_max) + 1);
  lam[0] = 1;
  std::vector<bigint> binom{1};  // Pascal row for current n
  for (int n = 1; n <= n_max; ++n) {
    binom.push_back(1);
    for (int i = n - 1; i > 0; --i) binom[i] += binom[i - 1];
    bigint acc = 0;
    for (int i = 0; i < n; ++i) acc += binom[i] * lam[i];
    lam[n] = acc;
  }
  return lam;
}

inline bigint fubini_lambda(int n) { return fubini_numbers(n).back(); }

namespace detail {

inline unsigned long long ull_factorial(int n) {
  unsigned long long f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<unsigned long long>(k);
  return f;  // exact through 20!
}

inline unsigned long long ull_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned long long>(n - k + i) /
                                   static_cast<unsigned long long>(i);
  return r;
}

}  // namespace detail

// Verifies, by exhaustive enumeration of all m <= nu, the counting identities
//   sum_{m<=nu, |m|=i} C(nu,m)                          = C(|nu|, i)
//   sum_{m<=nu} C(nu,m) |m|! |nu-m|!                    = (|nu|+1)!
//   sum_{m<=nu} C(nu,m) |m|! (|nu-m|+1)!                = (|nu|+2)!/2
//   sum_{m<=nu} C(nu,m) (|m|+2)!/2 (|nu-m|+2)!/2        = (|nu|+5)!/120
// in exact integer arithmetic.  Requires |nu| <= 12 so 17! fits in 64 bits.
inline bool combinatorial_identities_check(std::span<const int> nu) {
  const int order = std::accumulate(nu.begin(), nu.end(), 0);
  if (order > 12)
    throw std::invalid_argument("combinatorial_identities_check: |nu| must be <= 12");
  for (int v : nu)
    if (v < 0) throw std::invalid_argument("combinatorial_identities_check: negative entry");

  std::vector<unsigned long long> per_order(static_cast<std::size_t>(order) + 1, 0);
  unsigned long long s1 = 0, s2 = 0, s5 = 0;

  std::vector<int> m(nu.size(), 0);
  while (true) {
    unsigned long long cnm = 1;
    int mo = 0;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      cnm *= detail::ull_binomial(nu[j], m[j]);
      mo += m[j];
    }
    const int ro = order - mo;
    per_order[static_cast<std::size_t>(mo)] += cnm;
    s1 += cnm * detail::ull_factorial(mo) * detail::ull_factorial(ro);
    s2 += cnm * detail::ull_factorial(mo) * detail::ull_factorial(ro + 1);
    s5 += cnm * (detail::ull_factorial(mo + 2) / 2) * (detail::ull_factorial(ro + 2) / 2);

    // odometer over m <= nu
    std::size_t j = 0;
    for (; j < nu.size(); ++j) {
      if (m[j] < nu[j]) {
        ++m[j];
        break;
      }
      m[j] = 0;
    }
    if (j == nu.size()) break;
  }

  for (int i = 0; i <= order; ++i)
    if (per_order[static_cast<std::size_t>(i)] != detail::ull_binomial(order, i)) return false;
  if (s1 != detail::ull_factorial(order + 1)) return false;
  if (s2 != detail::ull_factorial(order + 2) / 2) return false;
  if (s5 != detail::ull_factorial(order + 5) / 120) return false;
  return true;
}

}  // namespace qmc
