#include "qmc/pointgen.hpp"
#include "qmc/rule_io.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

using Catch::Matchers::WithinAbs;

TEST_CASE("lattice points") {
  qmc::GeneratingVector gv{8, {1, 5}, ""};
  const auto p = qmc::lattice_point(3, gv);
  CHECK(p[0] == 3.0 / 8.0);
  CHECK(p[1] == 7.0 / 8.0);
  CHECK(qmc::lattice_point(0, gv) == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(qmc::lattice_point(8, gv), std::out_of_range);

  qmc::GeneratingVector g4{4, {1}, ""};
  std::set<double> seen;
  for (std::uint64_t i = 0; i < 4; ++i) seen.insert(qmc::lattice_point(i, g4)[0]);
  CHECK(seen == std::set<double>{0.0, 0.25, 0.5, 0.75});
}

TEST_CASE("radical inverse ordering of the lattice sequence") {
  qmc::GeneratingVector gv{16, {1}, ""};
  std::vector<double> out(1);
  const std::vector<double> expect{0.0, 0.5, 0.25, 0.75};
  for (std::uint64_t i = 0; i < 4; ++i) {
    qmc::lattice_seq_point(i, gv, 4, out);
    CHECK(out[0] == expect[static_cast<std::size_t>(i)]);
  }
  CHECK_THROWS_AS(qmc::lattice_seq_point(16, gv, 4, out), std::out_of_range);
}

TEST_CASE("lattice sequence prefixes form the embedded rules") {
  qmc::WeightParams params;
  params.s = 5;
  params.B = qmc::BSequence::rule(0.5, 2.0);
  const auto w = qmc::pod_weights(params, qmc::choose_lambda(2.0), qmc::FieldKind::kUniform);
  const int m_max = 10;
  const auto gv = qmc::construct_embedded(m_max, 5, w);
  for (int k = 0; k <= m_max; k += 2) {
    const std::uint64_t nk = 1ull << k;
    qmc::GeneratingVector small{nk, gv.z, ""};
    std::set<std::vector<double>> rule_set, seq_set;
    std::vector<double> buf(5);
    for (std::uint64_t i = 0; i < nk; ++i) {
      qmc::lattice_point(i, small, buf);
      rule_set.insert(buf);
      qmc::lattice_seq_point(i, gv, m_max, buf);
      seq_set.insert(buf);
    }
    CHECK(rule_set == seq_set);  // exact doubles: both dyadic over 2^k
  }
  // prefix in dimension: leading components form the rule of lower dimension
  qmc::GeneratingVector small{64, {gv.z.begin(), gv.z.begin() + 3}, ""};
  std::vector<double> full(5), head(3);
  for (std::uint64_t i = 0; i < 64; ++i) {
    qmc::lattice_point(i, small, head);
    qmc::lattice_point(i, qmc::GeneratingVector{64, gv.z, ""}, full);
    for (int j = 0; j < 3; ++j) CHECK(full[static_cast<std::size_t>(j)] == head[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("shift wraps around") {
  std::vector<double> p{0.75};
  qmc::apply_shift(p, std::vector<double>{0.5});
  CHECK_THAT(p[0], WithinAbs(0.25, 1e-15));
  std::vector<double> q{0.3, 0.6};
  qmc::apply_shift(q, std::vector<double>{0.0, 0.0});
  CHECK(q == std::vector<double>{0.3, 0.6});
}

TEST_CASE("shifting preserves pairwise differences mod 1") {
  qmc::GeneratingVector gv{16, {1, 7, 9}, ""};
  const auto delta = qmc::ShiftSet::generate(3, 1, 3).deltas[0];
  for (std::uint64_t i = 0; i < 16; ++i)
    for (std::uint64_t k = 0; k < 16; ++k) {
      auto a = qmc::lattice_point(i, gv);
      auto b = qmc::lattice_point(k, gv);
      auto sa = a, sb = b;
      qmc::apply_shift(sa, delta);
      qmc::apply_shift(sb, delta);
      for (int j = 0; j < 3; ++j) {
        const double d0 = a[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j)];
        const double d1 = sa[static_cast<std::size_t>(j)] - sb[static_cast<std::size_t>(j)];
        const double wrap = std::abs(d0 - d1);
        CHECK((wrap < 1e-12 || std::abs(wrap - 1.0) < 1e-12));
      }
    }
}

TEST_CASE("digital points from a hand matrix") {
  // C = [[0,1],[1,1]]: points 0, 1/4, 3/4, 1/2
  qmc::GF2Matrix C = qmc::GF2Matrix::zeros(2, 2);
  C.set(1, 2, true);
  C.set(2, 1, true);
  C.set(2, 2, true);
  std::vector<qmc::GF2Matrix> mats{C};
  std::vector<double> out(1);
  const std::vector<double> expect{0.0, 0.25, 0.75, 0.5};
  for (std::uint64_t i = 0; i < 4; ++i) {
    qmc::digital_point(i, mats, 2, out);
    CHECK(out[0] == expect[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("identity matrices generate van der Corput points") {
  std::vector<qmc::GF2Matrix> mats{qmc::GF2Matrix::identity(4), qmc::GF2Matrix::identity(4)};
  std::vector<double> out(2);
  qmc::GeneratingVector vdc{16, {1}, ""};
  std::vector<double> ref(1);
  for (std::uint64_t i = 0; i < 16; ++i) {
    qmc::digital_point(i, mats, 4, out);
    qmc::lattice_seq_point(i, vdc, 4, ref);
    CHECK(out[0] == ref[0]);
    CHECK(out[1] == ref[0]);
  }
}

TEST_CASE("gray stream is a permutation of the direct points") {
  std::uint64_t seed = 404;
  for (int m : {1, 4, 7, 10}) {
    const auto P = qmc::default_modulus(m);
    const std::uint64_t n = 1ull << m;
    const int s = 5;
    std::vector<qmc::GF2Matrix> mats;
    for (int j = 0; j < s; ++j)
      mats.push_back(qmc::hankel_matrix({1 + (oracle::splitmix64(seed) % (n - 1))}, P, m));
    qmc::DigitalSeqState st(mats, m);
    std::set<std::vector<double>> gray, direct;
    std::vector<double> buf(s);
    for (std::uint64_t i = 0; i < n; ++i) {
      st.current(buf);
      gray.insert(buf);
      if (i + 1 < n) qmc::digital_next_gray(st);
      qmc::digital_point(i, mats, m, buf);
      direct.insert(buf);
    }
    CHECK(gray == direct);
    CHECK_THROWS_AS(qmc::digital_next_gray(st), std::out_of_range);
  }
}

TEST_CASE("first gray step XORs exactly column one") {
  std::vector<qmc::GF2Matrix> mats{qmc::GF2Matrix::identity(3)};
  qmc::DigitalSeqState st(mats, 3);
  CHECK(st.state[0] == 0);  // origin before any XOR
  qmc::digital_next_gray(st);
  CHECK(st.state[0] == mats[0].col[0]);
}

TEST_CASE("offset restart matches a single pass") {
  std::uint64_t seed = 9;
  const int m = 8;
  const auto P = qmc::default_modulus(m);
  const std::uint64_t n = 1ull << m;
  std::vector<qmc::GF2Matrix> mats;
  for (int j = 0; j < 3; ++j)
    mats.push_back(qmc::hankel_matrix({1 + (oracle::splitmix64(seed) % (n - 1))}, P, m));
  std::vector<std::vector<double>> one_pass;
  qmc::DigitalSeqState full(mats, m);
  std::vector<double> buf(3);
  for (std::uint64_t i = 0; i < n; ++i) {
    full.current(buf);
    one_pass.push_back(buf);
    if (i + 1 < n) qmc::digital_next_gray(full);
  }
  const std::uint64_t cut = 100;
  qmc::DigitalSeqState a(mats, m, 0), b(mats, m, cut);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto& st = i < cut ? a : b;
    st.current(buf);
    CHECK(buf == one_pass[static_cast<std::size_t>(i)]);
    if (i + 1 < n && i + 1 != cut) qmc::digital_next_gray(st);
  }
}

TEST_CASE("bit interlacing") {
  // alpha=2, x=0.10, y=0.11 -> 0.1101 = 13/16
  const std::vector<std::uint64_t> xy{0b01, 0b11};
  CHECK(qmc::interlace_bits(xy, 2) == 0b1011);
  CHECK(qmc::detail::fixed_point_to_unit(qmc::interlace_bits(xy, 2)) == 13.0 / 16.0);
  // alpha=1 is the identity
  const std::vector<std::uint64_t> solo{0b1010101};
  CHECK(qmc::interlace_bits(solo, 7) == 0b1010101);
  // alpha=3 one-digit streams x=0.1, y=0.0, z=0.1 -> 0.101 = 5/8
  const std::vector<std::uint64_t> xyz{1, 0, 1};
  CHECK(qmc::interlace_bits(xyz, 1) == 0b101);
  CHECK(qmc::detail::fixed_point_to_unit(0b101) == 5.0 / 8.0);
  CHECK_THROWS_AS(qmc::interlace_bits(std::vector<std::uint64_t>{1, 1, 1}, 22),
                  std::overflow_error);
}

TEST_CASE("cube maps") {
  std::vector<double> t{0.5, 0.25};
  qmc::map_uniform(t);
  CHECK(t == std::vector<double>{0.0, -0.25});
  std::vector<double> w{0.5};
  qmc::map_lognormal(w);
  CHECK(w[0] == 0.0);
  std::vector<double> hi{0.975};
  qmc::map_lognormal(hi);
  CHECK_THAT(hi[0], WithinAbs(1.9599640, 5e-7));
  std::vector<double> bad{0.0};
  CHECK_THROWS_AS(qmc::map_lognormal(bad), std::domain_error);
}

TEST_CASE("shift sets are reproducible and in range") {
  const auto a = qmc::ShiftSet::generate(123, 4, 7);
  const auto b = qmc::ShiftSet::generate(123, 4, 7);
  CHECK(a.deltas == b.deltas);
  const auto c = qmc::ShiftSet::generate(124, 4, 7);
  CHECK(a.deltas != c.deltas);
  for (const auto& row : a.deltas)
    for (double v : row) {
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
}

TEST_CASE("estimator mean and standard error") {
  const std::vector<double> q{1.0, 3.0};
  const auto [mean, se] = qmc::estimate_with_shifts(q);
  CHECK(mean == 2.0);
  CHECK(se == 1.0);
  const std::vector<double> c(8, 0.7);
  CHECK(qmc::estimate_with_shifts(c).second == 0.0);
  CHECK_THROWS_AS(qmc::estimate_with_shifts(std::vector<double>{1.0}),
                  std::invalid_argument);
}

TEST_CASE("standard error concentrates near 1/sqrt(r) for normal inputs") {
  const int r = 10000;
  std::vector<double> q(r);
  std::uint64_t seed = 2718;
  for (int k = 0; k < r; ++k) {
    // Box-Muller from the deterministic stream
    const double u1 = oracle::uniform01(seed), u2 = oracle::uniform01(seed);
    q[static_cast<std::size_t>(k)] =
        std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * 3.14159265358979 * u2);
  }
  const auto [mean, se] = qmc::estimate_with_shifts(q);
  const double expect = 1.0 / std::sqrt(static_cast<double>(r));
  CHECK(std::abs(se - expect) < 3.0 * expect / std::sqrt(2.0 * (r - 1.0)));
  CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("random shifting is unbiased for a linear integrand") {
  // F(y) = y_1 integrates to 1/2; the grand mean over many shifts of the
  // shifted-rule estimates must sit within 4 standard errors of it.
  qmc::GeneratingVector gv{16, {1, 7}, ""};
  const int shifts = 10000;
  const auto ss = qmc::ShiftSet::generate(55, shifts, 2);
  std::vector<double> est(shifts);
  std::vector<double> p(2);
  for (int k = 0; k < shifts; ++k) {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < 16; ++i) {
      qmc::lattice_point(i, gv, p);
      qmc::apply_shift(p, ss.deltas[static_cast<std::size_t>(k)]);
      acc += p[0];
    }
    est[static_cast<std::size_t>(k)] = acc / 16.0;
  }
  const auto [mean, se] = qmc::estimate_with_shifts(est);
  CHECK(std::abs(mean - 0.5) < 4.0 * se);
}

TEST_CASE("z and col files round trip") {
  qmc::GeneratingVector gv{64, {1, 19, 27, 5}, "meta"};
  std::ostringstream zs;
  qmc::write_z(zs, gv);
  CHECK(zs.str() == "1\n19\n27\n5\n");
  std::istringstream zin(zs.str());
  CHECK(qmc::read_z(zin) == gv.z);

  const auto P = qmc::default_modulus(5);
  std::vector<qmc::GF2Matrix> mats{qmc::hankel_matrix({9}, P, 5),
                                   qmc::hankel_matrix({21}, P, 5)};
  std::ostringstream cs;
  qmc::write_col(cs, mats, 1);
  std::istringstream cin(cs.str());
  const auto file = qmc::read_col(cin);
  CHECK(file.m == 5);
  CHECK(file.alpha == 1);
  REQUIRE(file.matrices.size() == 2);
  for (std::size_t d = 0; d < 2; ++d) CHECK(file.matrices[d].col == mats[d].col);

  std::istringstream bad("3 x 4\n");
  CHECK_THROWS(qmc::read_col(bad));
}

TEST_CASE("point generation scales linearly in n") {
  // doubling n should double wall time within a generous band
  const int m_small = 17, m_big = 18;
  const auto P = qmc::default_modulus(20);
  std::vector<qmc::GF2Matrix> mats;
  std::uint64_t seed = 3;
  for (int j = 0; j < 8; ++j)
    mats.push_back(qmc::hankel_matrix({1 + (oracle::splitmix64(seed) % ((1ull << 20) - 1))},
                                      P, 20));
  auto run = [&](int m_bits) {
    qmc::DigitalSeqState st(mats, m_bits);
    std::vector<double> buf(8);
    double sink = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t n = 1ull << m_bits;
    for (std::uint64_t i = 0; i < n; ++i) {
      st.current(buf);
      sink += buf[0];
      if (i + 1 < n) qmc::digital_next_gray(st);
    }
    const auto t1 = std::chrono::steady_clock::now();
    volatile double keep = sink;
    (void)keep;
    return std::chrono::duration<double>(t1 - t0).count();
  };
  run(12);  // warm up
  double best_small = 1e9, best_big = 1e9;
  for (int rep = 0; rep < 5; ++rep) {
    best_small = std::min(best_small, run(m_small));
    best_big = std::min(best_big, run(m_big));
  }
  const double ratio = best_big / best_small;
  CHECK(ratio > 1.4);
  CHECK(ratio < 2.9);
}
