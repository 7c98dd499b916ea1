#pragma once

#include "qmc/cbc_lattice.hpp"
#include "qmc/cbc_polylattice.hpp"
#include "qmc/gf2.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

// z.txt: one decimal integer per line, line j = z_j, newline-terminated,
// no header.
inline void write_z(std::ostream& out, const GeneratingVector& gv) {
  for (auto z : gv.z) out << z << "\n";
}

inline void write_z_file(const std::string& path, const GeneratingVector& gv) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_z(out, gv);
}

inline std::vector<std::uint32_t> read_z(std::istream& in) {
  std::vector<std::uint32_t> z;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(line.substr(first), &used);
      z.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      throw std::runtime_error("z file: parse error at line " + std::to_string(lineno));
    }
  }
  if (z.empty()) throw std::runtime_error("z file: no components found");
  return z;
}

inline std::vector<std::uint32_t> read_z_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_z(in);
}

// .col format: a '#' header comment recording s, m, alpha (and the retained
// row count), then one line per dimension holding the matrix's m column
// integers in decimal, space-separated, columns left to right.
inline void write_col(std::ostream& out, std::span<const GF2Matrix> mats, int alpha,
                      int keep_rows = 0) {
  if (mats.empty()) throw std::invalid_argument("write_col: no matrices");
  const int m = mats[0].cols;
  int rows = mats[0].rows;
  if (keep_rows > 0) rows = std::min(rows, keep_rows);
  const std::uint64_t mask = rows >= 64 ? ~std::uint64_t{0}
                                        : ((std::uint64_t{1} << rows) - 1);
  out << "# s=" << mats.size() << " m=" << m << " alpha=" << alpha
      << " rows=" << rows << "\n";
  for (const auto& mat : mats) {
    for (int t = 0; t < m; ++t) {
      if (t) out << ' ';
      out << (mat.col[static_cast<std::size_t>(t)] & mask);
    }
    out << "\n";
  }
}

inline void write_col_file(const std::string& path, std::span<const GF2Matrix> mats,
                           int alpha, int keep_rows = 0) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_col(out, mats, alpha, keep_rows);
}

struct ColFile {
  std::vector<GF2Matrix> matrices;
  int m = 0;
  int alpha = 1;
  int rows = 64;
};

inline ColFile read_col(std::istream& in) {
  ColFile file;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string tok;
      while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const int val = std::stoi(tok.substr(eq + 1));
        if (key == "m") file.m = val;
        else if (key == "alpha") file.alpha = val;
        else if (key == "rows") file.rows = val;
      }
      have_header = true;
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::uint64_t> cols;
    std::uint64_t v;
    while (ls >> v) cols.push_back(v);
    if (cols.empty() || !ls.eof())
      throw std::runtime_error(".col file: parse error at line " + std::to_string(lineno));
    if (!file.matrices.empty() &&
        cols.size() != static_cast<std::size_t>(file.matrices.front().cols))
      throw std::runtime_error(".col file: ragged column count at line " +
                               std::to_string(lineno));
    GF2Matrix mat;
    mat.cols = static_cast<int>(cols.size());
    mat.rows = file.rows;
    mat.col = std::move(cols);
    file.matrices.push_back(std::move(mat));
  }
  if (file.matrices.empty()) throw std::runtime_error(".col file: no matrices found");
  if (!have_header || file.m == 0) file.m = file.matrices.front().cols;
  for (auto& mat : file.matrices) mat.rows = file.rows;
  return file;
}

inline ColFile read_col_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_col(in);
}

// The four artifact files of a constructed interlaced rule.
inline void write_rule_files(const std::string& dir, const DigitalRule& rule) {
  const std::string base = dir.empty() ? std::string() : dir + "/";
  write_col_file(base + "Cs.col", rule.C, rule.alpha);
  write_col_file(base + "Bs.col", rule.B, rule.alpha);
  write_col_file(base + "Bs53.col", rule.B, rule.alpha, 53);
  write_col_file(base + "Bs64.col", rule.B, rule.alpha, 64);
}

}  // namespace qmc
