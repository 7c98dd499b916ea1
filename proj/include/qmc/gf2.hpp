#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qmc {

// Polynomial over GF(2) as a coefficient bitmask: bit k is the coefficient
// of the k-th power of the formal variable.
struct BinaryPolynomial {
  std::uint64_t mask = 0;

  int degree() const { return mask == 0 ? -1 : 63 - std::countl_zero(mask); }
  bool zero() const { return mask == 0; }

  friend bool operator==(BinaryPolynomial a, BinaryPolynomial b) { return a.mask == b.mask; }

  static BinaryPolynomial x_pow(int k) { return {std::uint64_t{1} << k}; }

  friend BinaryPolynomial operator^(BinaryPolynomial a, BinaryPolynomial b) {
    return {a.mask ^ b.mask};
  }

  // Carry-less product; the result must fit 64 coefficient bits.
  friend BinaryPolynomial operator*(BinaryPolynomial a, BinaryPolynomial b) {
    std::uint64_t acc = 0;
    std::uint64_t bm = b.mask;
    for (int k = 0; bm != 0; ++k, bm >>= 1)
      if (bm & 1) acc ^= a.mask << k;
    return {acc};
  }

  friend BinaryPolynomial operator%(BinaryPolynomial a, BinaryPolynomial p) {
    if (p.zero()) throw std::invalid_argument("BinaryPolynomial: modulus is zero");
    const int dp = p.degree();
    std::uint64_t r = a.mask;
    while (r != 0) {
      const int dr = 63 - std::countl_zero(r);
      if (dr < dp) break;
      r ^= p.mask << (dr - dp);
    }
    return {r};
  }

  // Trial division by every polynomial of degree <= deg/2 with nonzero
  // constant term; exact for the degrees used here (<= 32).
  bool irreducible() const {
    const int d = degree();
    if (d <= 0) return false;
    if ((mask & 1) == 0) return false;  // divisible by the variable itself
    for (int dd = 1; dd <= d / 2; ++dd)
      for (std::uint64_t q = (std::uint64_t{1} << dd) | 1; q < (std::uint64_t{2} << dd);
           q += 2)
        if ((BinaryPolynomial{*this} % BinaryPolynomial{q}).zero()) return false;
    return true;
  }
};

// Smallest irreducible polynomial of each degree 1..32 (as integer masks);
// irreducibility is re-verified when an entry is handed out.
inline BinaryPolynomial default_modulus(int m) {
  static constexpr std::uint64_t kTable[] = {
      0x3ull,         0x7ull,         0xbull,         0x13ull,        0x25ull,
      0x43ull,        0x83ull,        0x11bull,       0x203ull,       0x409ull,
      0x805ull,       0x1009ull,      0x201bull,      0x4021ull,      0x8003ull,
      0x1002bull,     0x20009ull,     0x40009ull,     0x80027ull,     0x100009ull,
      0x200005ull,    0x400003ull,    0x800021ull,    0x100001bull,   0x2000009ull,
      0x400001bull,   0x8000027ull,   0x10000003ull,  0x20000005ull,  0x40000003ull,
      0x80000009ull,  0x10000008dull};
  if (m < 1 || m > 32)
    throw std::out_of_range("default_modulus: degree must lie in [1, 32]");
  const BinaryPolynomial p{kTable[m - 1]};
  if (p.degree() != m || !p.irreducible())
    throw std::logic_error("default_modulus: table entry failed verification");
  return p;
}

// Coefficients a_1..a_L of the Laurent expansion z/P = sum_l a_l x^-l over
// GF(2)((x^-1)).  Long division digit by digit: the remainder is pushed up
// one power at a time and reduced by P.
inline std::vector<std::uint8_t> laurent_expansion(BinaryPolynomial z, BinaryPolynomial P,
                                                   int L) {
  if (P.zero()) throw std::invalid_argument("laurent_expansion: modulus is zero");
  if (L < 1) throw std::invalid_argument("laurent_expansion: L must be >= 1");
  const int m = P.degree();
  if (z.degree() >= m)
    throw std::invalid_argument("laurent_expansion: deg z must be below deg P");
  std::vector<std::uint8_t> a(static_cast<std::size_t>(L));
  std::uint64_t r = z.mask;  // remainder, degree < m throughout
  for (int l = 0; l < L; ++l) {
    r <<= 1;
    const bool hit = (r >> m) & 1;
    a[static_cast<std::size_t>(l)] = hit ? 1 : 0;
    if (hit) r ^= P.mask;
  }
  return a;
}

// GF(2) matrix with column-wise bit encoding: bit k (least significant) of
// col[t] is row k+1, i.e. contributes output weight 2^-(k+1).
struct GF2Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint64_t> col;

  static GF2Matrix zeros(int rows, int cols) {
    if (rows < 1 || rows > 64 || cols < 1)
      throw std::invalid_argument("GF2Matrix: rows must lie in [1, 64]");
    GF2Matrix mat;
    mat.rows = rows;
    mat.cols = cols;
    mat.col.assign(static_cast<std::size_t>(cols), 0);
    return mat;
  }
  static GF2Matrix identity(int nn) {
    GF2Matrix mat = zeros(nn, nn);
    for (int t = 0; t < nn; ++t) mat.col[static_cast<std::size_t>(t)] = std::uint64_t{1} << t;
    return mat;
  }

  bool get(int r, int t) const {  // 1-based row/column
    return (col[static_cast<std::size_t>(t - 1)] >> (r - 1)) & 1;
  }
  void set(int r, int t, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (r - 1);
    if (v)
      col[static_cast<std::size_t>(t - 1)] |= bit;
    else
      col[static_cast<std::size_t>(t - 1)] &= ~bit;
  }

  friend bool operator==(const GF2Matrix& a, const GF2Matrix& b) {
    return a.rows == b.rows && a.col == b.col;
  }
};

// Hankel generating matrix C[r][t] = a_{r+t-1} of the expansion z/P.
inline GF2Matrix hankel_matrix(BinaryPolynomial z, BinaryPolynomial P, int m) {
  if (m < 1 || m > 64) throw std::invalid_argument("hankel_matrix: m out of range");
  const auto a = laurent_expansion(z, P, 2 * m - 1);
  GF2Matrix mat = GF2Matrix::zeros(m, m);
  for (int r = 1; r <= m; ++r)
    for (int t = 1; t <= m; ++t) mat.set(r, t, a[static_cast<std::size_t>(r + t - 2)] != 0);
  return mat;
}

// Row-interlace alpha successive m x m matrices into (alpha m) x m matrices:
// row r of B_d is row ceil(r/alpha) of C_{alpha(d-1) + ((r-1) mod alpha) + 1}.
inline std::vector<GF2Matrix> interlace_matrices(std::span<const GF2Matrix> cs, int alpha) {
  if (alpha < 1) throw std::invalid_argument("interlace_matrices: alpha must be >= 1");
  if (cs.empty() || cs.size() % static_cast<std::size_t>(alpha) != 0)
    throw std::invalid_argument("interlace_matrices: list length must be a multiple of alpha");
  const int m = cs[0].rows;
  for (const auto& c : cs)
    if (c.rows != m || c.cols != m)
      throw std::invalid_argument("interlace_matrices: matrices must share size m x m");
  if (alpha * m > 64)
    throw std::invalid_argument("interlace_matrices: alpha*m exceeds the 64-bit row budget");
  const int s = static_cast<int>(cs.size()) / alpha;
  std::vector<GF2Matrix> bs;
  bs.reserve(static_cast<std::size_t>(s));
  for (int d = 1; d <= s; ++d) {
    GF2Matrix b = GF2Matrix::zeros(alpha * m, m);
    for (int r = 1; r <= alpha * m; ++r) {
      const int src_row = (r - 1) / alpha + 1;
      const int src_idx = alpha * (d - 1) + (r - 1) % alpha;
      for (int t = 1; t <= m; ++t)
        b.set(r, t, cs[static_cast<std::size_t>(src_idx)].get(src_row, t));
    }
    bs.push_back(std::move(b));
  }
  return bs;
}

}  // namespace qmc
