#pragma once

#include "qmc/cbc_lattice.hpp"
#include "qmc/gf2.hpp"
#include "qmc/normal.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qmc {

namespace detail {

inline std::uint64_t bit_reverse64(std::uint64_t v) {
  v = ((v >> 1) & 0x5555555555555555ull) | ((v & 0x5555555555555555ull) << 1);
  v = ((v >> 2) & 0x3333333333333333ull) | ((v & 0x3333333333333333ull) << 2);
  v = ((v >> 4) & 0x0f0f0f0f0f0f0f0full) | ((v & 0x0f0f0f0f0f0f0f0full) << 4);
  v = ((v >> 8) & 0x00ff00ff00ff00ffull) | ((v & 0x00ff00ff00ff00ffull) << 8);
  v = ((v >> 16) & 0x0000ffff0000ffffull) | ((v & 0x0000ffff0000ffffull) << 16);
  return (v >> 32) | (v << 32);
}

// Fixed-point state (bit k = digit of weight 2^-(k+1)) to a double in [0,1).
// Emission keeps the top 53 digits, so states never round up to 1.
inline double fixed_point_to_unit(std::uint64_t state) {
  return std::ldexp(static_cast<double>(bit_reverse64(state) >> 11), -53);
}

}  // namespace detail

// t_i = (i z mod n)/n, exact in binary for n = 2^m.
inline void lattice_point(std::uint64_t i, const GeneratingVector& gv,
                          std::span<double> out) {
  if (i >= gv.n) throw std::out_of_range("lattice_point: index outside [0, n)");
  if (out.size() < gv.z.size()) throw std::invalid_argument("lattice_point: output too short");
  const double inv_n = 1.0 / static_cast<double>(gv.n);
  for (std::size_t j = 0; j < gv.z.size(); ++j)
    out[j] = static_cast<double>((i * gv.z[j]) % gv.n) * inv_n;
}

inline std::vector<double> lattice_point(std::uint64_t i, const GeneratingVector& gv) {
  std::vector<double> out(gv.z.size());
  lattice_point(i, gv, out);
  return out;
}

// Lattice sequence: component j of point i is frac(phi2(i) z_j) with phi2 the
// base-2 radical inverse over m_max bits.  Every 2^k-prefix is, as a set, the
// lattice rule with n = 2^k.
inline void lattice_seq_point(std::uint64_t i, const GeneratingVector& gv, int m_max,
                              std::span<double> out) {
  if (m_max < 0 || m_max > 62) throw std::invalid_argument("lattice_seq_point: bad m_max");
  if (i >= (std::uint64_t{1} << m_max))
    throw std::out_of_range("lattice_seq_point: index outside [0, 2^m_max)");
  if (out.size() < gv.z.size())
    throw std::invalid_argument("lattice_seq_point: output too short");
  const std::uint64_t n = std::uint64_t{1} << m_max;
  const std::uint64_t rev = m_max == 0 ? 0 : detail::bit_reverse64(i) >> (64 - m_max);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < gv.z.size(); ++j)
    out[j] = static_cast<double>((rev * gv.z[j]) & (n - 1)) * inv_n;
}

// Componentwise fractional part of t + delta.
inline void apply_shift(std::span<double> point, std::span<const double> delta) {
  if (delta.size() < point.size()) throw std::invalid_argument("apply_shift: shift too short");
  for (std::size_t j = 0; j < point.size(); ++j) {
    double v = point[j] + delta[j];
    if (v >= 1.0) v -= 1.0;
    point[j] = v;
  }
}

// Direct digital point: component d is the fixed-point value of
// B_d [vec(i)]_m over GF(2).
inline void digital_point(std::uint64_t i, std::span<const GF2Matrix> mats, int m,
                          std::span<double> out) {
  if (i >= (std::uint64_t{1} << m)) throw std::out_of_range("digital_point: index outside [0, 2^m)");
  if (out.size() < mats.size()) throw std::invalid_argument("digital_point: output too short");
  for (std::size_t d = 0; d < mats.size(); ++d) {
    std::uint64_t state = 0;
    std::uint64_t bits = i;
    while (bits != 0) {
      const int k = std::countr_zero(bits);
      state ^= mats[d].col[static_cast<std::size_t>(k)];
      bits &= bits - 1;
    }
    out[d] = detail::fixed_point_to_unit(state);
  }
}

// Gray-code streaming generator over a set of generating matrices.  The
// stream at step i carries the point with natural index gray(i) = i ^ (i>>1);
// advancing XORs one column per dimension.
struct DigitalSeqState {
  std::vector<GF2Matrix> matrices;
  int m = 0;
  std::uint64_t index = 0;
  std::vector<std::uint64_t> state;

  DigitalSeqState() = default;
  DigitalSeqState(std::vector<GF2Matrix> mats, int m_bits, std::uint64_t start = 0)
      : matrices(std::move(mats)), m(m_bits) {
    if (m < 0 || m > 62) throw std::invalid_argument("DigitalSeqState: bad m");
    for (const auto& mat : matrices)
      if (mat.cols < m) throw std::invalid_argument("DigitalSeqState: matrix has too few columns");
    reset(start);
  }

  std::uint64_t size() const { return std::uint64_t{1} << m; }

  void reset(std::uint64_t start) {
    if (start >= size()) throw std::out_of_range("DigitalSeqState: offset outside [0, 2^m)");
    index = start;
    state.assign(matrices.size(), 0);
    std::uint64_t g = start ^ (start >> 1);
    while (g != 0) {
      const int k = std::countr_zero(g);
      for (std::size_t d = 0; d < matrices.size(); ++d)
        state[d] ^= matrices[d].col[static_cast<std::size_t>(k)];
      g &= g - 1;
    }
  }

  void current(std::span<double> out) const {
    if (out.size() < state.size())
      throw std::invalid_argument("DigitalSeqState: output too short");
    for (std::size_t d = 0; d < state.size(); ++d)
      out[d] = detail::fixed_point_to_unit(state[d]);
  }
};

// Advance to the next Gray-coded point: XOR column ctz(i+1)+1 of each B_d.
inline void digital_next_gray(DigitalSeqState& st) {
  if (st.index + 1 >= st.size())
    throw std::out_of_range("digital_next_gray: sequence exhausted");
  const int k = std::countr_zero(st.index + 1);
  for (std::size_t d = 0; d < st.matrices.size(); ++d)
    st.state[d] ^= st.matrices[d].col[static_cast<std::size_t>(k)];
  ++st.index;
}

// Digit interlacing of alpha fixed-point numbers of m digits each: output
// digit (k-1) alpha + a is digit k of stream a.
inline std::uint64_t interlace_bits(std::span<const std::uint64_t> values, int m) {
  const int alpha = static_cast<int>(values.size());
  if (alpha < 1) throw std::invalid_argument("interlace_bits: need at least one stream");
  if (m < 1) throw std::invalid_argument("interlace_bits: m must be >= 1");
  if (alpha * m > 64)
    throw std::overflow_error("interlace_bits: alpha*m exceeds the 64-bit precision");
  std::uint64_t out = 0;
  for (int a = 1; a <= alpha; ++a) {
    std::uint64_t v = values[static_cast<std::size_t>(a - 1)];
    while (v != 0) {
      const int k = std::countr_zero(v) + 1;  // digit index in the stream
      if (k > m) break;
      out |= std::uint64_t{1} << ((k - 1) * alpha + a - 1);
      v &= v - 1;
    }
  }
  return out;
}

// Cube-to-domain maps: uniform shifts to [-1/2, 1/2]; lognormal applies the
// inverse normal CDF componentwise and refuses coordinates at 0 or 1.
inline void map_uniform(std::span<double> point) {
  for (double& t : point) t -= 0.5;
}

inline void map_lognormal(std::span<double> point) {
  for (double& t : point) {
    if (!(t > 0.0 && t < 1.0))
      throw std::domain_error("map_lognormal: coordinate at 0 or 1 maps to an infinite value");
    t = inv_normal_cdf(t);
  }
}

// Counter-based shift generator: every draw depends only on (seed, counter),
// so a ShiftSet is reproducible bit for bit from (seed, r, s).
namespace detail {
inline std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(counter_rng(seed, counter) >> 11) * 0x1.0p-53;
}
}  // namespace detail

struct ShiftSet {
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> deltas;  // r shifts of dimension s

  static ShiftSet generate(std::uint64_t seed, int r, int s) {
    if (r < 1 || s < 1) throw std::invalid_argument("ShiftSet: r and s must be positive");
    ShiftSet set;
    set.seed = seed;
    set.deltas.assign(static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(s)));
    for (int k = 0; k < r; ++k)
      for (int j = 0; j < s; ++j)
        set.deltas[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
            detail::counter_uniform(seed, static_cast<std::uint64_t>(k) *
                                              static_cast<std::uint64_t>(s) +
                                          static_cast<std::uint64_t>(j));
    return set;
  }
};

// mean = (1/r) sum Q_k, stderr = sqrt(sum (Q_k - mean)^2 / (r(r-1))).
inline std::pair<double, double> estimate_with_shifts(std::span<const double> values) {
  const std::size_t r = values.size();
  if (r < 2)
    throw std::invalid_argument("estimate_with_shifts: need r >= 2 for a standard error");
  bool constant = true;
  for (double q : values) constant = constant && q == values[0];
  if (constant) return {values[0], 0.0};
  double mean = 0.0;
  for (double q : values) mean += q;
  mean /= static_cast<double>(r);
  double ss = 0.0;
  for (double q : values) ss += (q - mean) * (q - mean);
  const double stderr_est = std::sqrt(ss / (static_cast<double>(r) * static_cast<double>(r - 1)));
  return {mean, stderr_est};
}

}  // namespace qmc
