#pragma once

#include "qmc/fe1d.hpp"
#include "qmc/weights.hpp"
#include "qmc/zeta.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

// Parametric diffusion coefficient on D = (0,1) with analytic sine terms
//   uniform:    a(x,y) = a0 + sum_j y_j c j^-d2 sin(j pi x),  y in [-1/2,1/2]^s
//   lognormal:  a(x,y) = a0 exp(sum_j y_j c j^-d2 sin(j pi x)),  y in R^s
// Term sup-norms are c j^-d2, non-increasing in j.
struct CoefficientField {
  FieldKind kind = FieldKind::kUniform;
  double a0 = 2.0;
  double c = 0.5;
  double d2 = 2.0;
  int s = 0;

  void validate() const {
    if (s < 0) throw std::invalid_argument("CoefficientField: s must be >= 0");
    if (c < 0.0) throw std::invalid_argument("CoefficientField: c must be >= 0");
    if (c > 0.0 && !(d2 > 1.0))
      throw std::invalid_argument("CoefficientField: d2 must exceed 1");
    if (!(a0 > 0.0)) throw std::invalid_argument("CoefficientField: a0 must be positive");
    if (kind == FieldKind::kUniform && !(a_min() > 0.0))
      throw std::invalid_argument(
          "CoefficientField: a0 - sum ||psi_j||/2 must stay positive (U2)");
  }

  double term_amp(int j) const {
    return c == 0.0 ? 0.0 : c * std::pow(static_cast<double>(j), -d2);
  }
  double term(int j, double x) const {
    return term_amp(j) * std::sin(j * std::numbers::pi * x);
  }
  double series_sup() const { return c == 0.0 ? 0.0 : c * riemann_zeta(d2); }

  // Uniform-case bounds over the full (untruncated) series.
  double a_min() const { return a0 - 0.5 * series_sup(); }
  double a_max() const { return a0 + 0.5 * series_sup(); }

  double b_j(int j) const { return term_amp(j) / a_min(); }          // uniform
  double beta_j(int j) const { return term_amp(j); }                 // lognormal
  double bbar_j(int j) const {                                       // W^{1,inf} variant
    return term_amp(j) * std::max(1.0, j * std::numbers::pi) / a_min();
  }
  double betabar_j(int j) const {
    return term_amp(j) * std::max(1.0, j * std::numbers::pi);
  }
  // B_j sequence feeding the weight constructions.
  BSequence bounds_sequence() const {
    if (c == 0.0) return BSequence::rule(1e-30, 2.0);  // degenerate y-independent field
    return kind == FieldKind::kUniform ? BSequence::rule(c / a_min(), d2)
                                       : BSequence::rule(c, d2);
  }

  double eval(double x, std::span<const double> y) const {
    double sum = 0.0;
    for (std::size_t j = y.size(); j >= 1; --j)  // small terms first
      sum += y[j - 1] * term(static_cast<int>(j), x);
    if (kind == FieldKind::kUniform) {
      const double a = a0 + sum;
      if (!(a > 0.0))
        throw std::domain_error("CoefficientField: sampled coefficient is nonpositive");
      return a;
    }
    return a0 * std::exp(sum);
  }
};

inline CoefficientField field_preset(const std::string& name) {
  CoefficientField f;
  if (name == "uniform-analytic") {
    f.kind = FieldKind::kUniform;
    f.a0 = 1.0;
    f.c = 0.0;
  } else if (name == "uniform-d2-2") {
    f.kind = FieldKind::kUniform;
    f.a0 = 2.0;
    f.c = 0.5;
    f.d2 = 2.0;
  } else if (name == "uniform-d2-3") {
    f.kind = FieldKind::kUniform;
    f.a0 = 2.0;
    f.c = 0.5;
    f.d2 = 3.0;
  } else if (name == "lognormal-d2-2") {
    f.kind = FieldKind::kLognormal;
    f.a0 = 1.0;
    f.c = 0.5;
    f.d2 = 2.0;
  } else if (name == "lognormal-d2-3") {
    f.kind = FieldKind::kLognormal;
    f.a0 = 1.0;
    f.c = 0.5;
    f.d2 = 3.0;
  } else {
    throw std::invalid_argument("unknown field preset '" + name + "'");
  }
  return f;
}

// Element-midpoint samples of the terms for one mesh, so that a coefficient
// evaluation per sample costs one multiply-add per (term, element).
struct FieldTable {
  const CoefficientField* field = nullptr;
  int elements = 0;
  int s = 0;
  std::vector<double> term_at_mid;  // [j-1][e] flattened, s x M

  FieldTable() = default;
  FieldTable(const CoefficientField& f, int truncation_s, int m_elements)
      : field(&f), elements(m_elements), s(truncation_s) {
    if (m_elements < 2) throw std::invalid_argument("FieldTable: need at least 2 elements");
    if (truncation_s < 0) throw std::invalid_argument("FieldTable: negative dimension");
    term_at_mid.resize(static_cast<std::size_t>(s) * static_cast<std::size_t>(elements));
    const double h = 1.0 / static_cast<double>(elements);
    for (int j = 1; j <= s; ++j)
      for (int e = 0; e < elements; ++e)
        term_at_mid[static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(elements) +
                    static_cast<std::size_t>(e)] = f.term(j, (e + 0.5) * h);
  }

  // a(mid_e, y) for all elements; y may be shorter than s (treated as zero
  // tail, the dimension-truncated field).
  void coefficient(std::span<const double> y, std::span<double> a_out) const {
    if (a_out.size() < static_cast<std::size_t>(elements))
      throw std::invalid_argument("FieldTable: output too short");
    const int sy = std::min<int>(s, static_cast<int>(y.size()));
    for (int e = 0; e < elements; ++e) a_out[static_cast<std::size_t>(e)] = 0.0;
    for (int j = sy; j >= 1; --j) {
      const double yj = y[static_cast<std::size_t>(j - 1)];
      const double* row = term_at_mid.data() +
                          static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(elements);
      for (int e = 0; e < elements; ++e) a_out[static_cast<std::size_t>(e)] += yj * row[e];
    }
    if (field->kind == FieldKind::kUniform) {
      for (int e = 0; e < elements; ++e) {
        a_out[static_cast<std::size_t>(e)] += field->a0;
        if (!(a_out[static_cast<std::size_t>(e)] > 0.0))
          throw std::domain_error("FieldTable: sampled coefficient is nonpositive");
      }
    } else {
      for (int e = 0; e < elements; ++e)
        a_out[static_cast<std::size_t>(e)] = field->a0 * std::exp(a_out[static_cast<std::size_t>(e)]);
    }
  }
};

// Truncated-field FE solve: coefficient at the element midpoints, then the
// tridiagonal Galerkin system.
inline FESolution assemble_solve(const CoefficientField& field, std::span<const double> y,
                                 int m_elements, const std::function<double(double)>& f) {
  FieldTable table(field, static_cast<int>(y.size()), m_elements);
  std::vector<double> a(static_cast<std::size_t>(m_elements));
  table.coefficient(y, a);
  return solve_tridiag(a, f);
}

}  // namespace qmc
