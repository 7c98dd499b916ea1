#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace qmc {

// In-place iterative radix-2 FFT for power-of-two lengths.  Only power-of-two
// transforms are ever needed here: the candidate groups in the CBC search are
// (Z/2^k)^* which split as {+-1} x <5> with cyclic part of power-of-two order.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  assert((n & (n - 1)) == 0);
  if (n <= 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

// Circular cross-correlation c[b] = sum_e f[(e+b) mod n] g[e] of two real
// sequences, via the convolution theorem.
inline std::vector<double> cross_correlation_pow2(const std::vector<double>& f,
                                                  const std::vector<double>& g) {
  assert(f.size() == g.size());
  const std::size_t n = f.size();
  if (n == 1) return {f[0] * g[0]};
  std::vector<std::complex<double>> fa(f.begin(), f.end());
  std::vector<std::complex<double>> ga(g.begin(), g.end());
  fft_pow2(fa, false);
  fft_pow2(ga, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= std::conj(ga[i]);
  fft_pow2(fa, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace qmc
