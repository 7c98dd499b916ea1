#pragma once

#include "qmc/expr.hpp"
#include "qmc/normal.hpp"
#include "qmc/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

enum class FieldKind { kUniform, kLognormal };

// The sequence of derivative-bound factors B_j, either as explicit values,
// as the algebraic rule c*j^-d2, or as a general expression in j (and
// optionally the smoothness index v, which only SPOD weights consume).
class BSequence {
 public:
  static BSequence rule(double c, double d2) {
    if (!(c > 0.0)) throw std::invalid_argument("BSequence: c must be positive");
    BSequence b;
    b.c_ = c;
    b.d2_ = d2;
    return b;
  }
  static BSequence values(std::vector<double> v) {
    for (double x : v)
      if (!(x > 0.0)) throw std::invalid_argument("BSequence: entries must be positive");
    BSequence b;
    b.values_ = std::move(v);
    return b;
  }
  static BSequence expression(std::string text) {
    BSequence b;
    b.expr_ = Expression::parse(text);
    b.expr_text_ = std::move(text);
    return b;
  }

  double value(std::size_t j, int nu = 1) const {
    if (expr_) {
      const double x = expr_->eval(static_cast<double>(j), static_cast<double>(nu));
      if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("BSequence: expression not positive at j=" +
                                    std::to_string(j));
      return x;
    }
    if (!values_.empty()) {
      if (j < 1 || j > values_.size())
        throw std::out_of_range("BSequence: index beyond supplied values");
      return values_[j - 1];
    }
    return c_ * std::pow(static_cast<double>(j), -d2_);
  }

  // sum_{j>=1} B_j^p.  Exact zeta sum for the rule form; for explicit values
  // the supplied finite sequence is summed (zero tail); expressions are
  // summed until the increments fall below a relative cutoff.
  double p_sum(double p) const {
    if (!(p > 0.0)) throw std::invalid_argument("BSequence: p must be positive");
    if (!values_.empty()) {
      double acc = 0.0;
      for (double x : values_) acc += std::pow(x, p);
      return acc;
    }
    if (!expr_) {
      if (!(d2_ * p > 1.0))
        throw std::invalid_argument("BSequence: sum of B_j^p diverges (d2*p <= 1)");
      return std::pow(c_, p) * riemann_zeta(d2_ * p);
    }
    double acc = 0.0;
    for (std::size_t j = 1; j <= 1u << 22; ++j) {
      const double t = std::pow(value(j), p);
      acc += t;
      if (j > 64 && t < 1e-16 * acc) return acc;
    }
    throw std::invalid_argument("BSequence: expression p-sum did not converge");
  }

  bool is_rule() const { return !expr_ && values_.empty(); }
  bool nu_dependent() const { return expr_ && expr_->uses_v(); }
  double rule_c() const { return c_; }
  double rule_d2() const { return d2_; }
  std::string describe() const {
    if (expr_) return expr_text_;
    if (!values_.empty()) return "file[" + std::to_string(values_.size()) + "]";
    std::ostringstream os;
    os << c_ << "*j^-" << d2_;
    return os.str();
  }

 private:
  double c_ = 1.0, d2_ = 2.0;
  std::vector<double> values_;
  std::optional<Expression> expr_;
  std::string expr_text_;
};

// Parameters of the generalized derivative bound
//   |d^nu F| <~ ((|nu|+a1)!)^d1 prod_j (a2 B_j)^{nu_j} exp(a3 B_j |y_j|).
struct WeightParams {
  int s = 0;
  int alpha = 1;
  int a1 = 0;
  double a2 = 1.0;
  double a3 = 0.0;
  double d1 = 1.0;
  double d2 = 2.0;
  double delta = 0.125;
  BSequence B = BSequence::rule(1.0, 2.0);

  void validate() const {
    if (s <= 0) throw std::invalid_argument("WeightParams: s must be positive");
    if (alpha < 1) throw std::invalid_argument("WeightParams: alpha must be >= 1");
    if (a1 < 0) throw std::invalid_argument("WeightParams: a1 must be >= 0");
    if (!(a2 > 0.0)) throw std::invalid_argument("WeightParams: a2 must be positive");
    if (a3 < 0.0) throw std::invalid_argument("WeightParams: a3 must be >= 0");
    if (d1 < 0.0) throw std::invalid_argument("WeightParams: d1 must be >= 0");
    if (!(delta > 0.0 && delta < 0.5))
      throw std::invalid_argument("WeightParams: delta must lie in (0, 1/2)");
    if (B.is_rule()) {
      if (!(d2 > 1.0)) throw std::invalid_argument("WeightParams: d2 must exceed 1");
      // non-increasing by construction for the rule form
    }
    for (int j = 1; j <= s; ++j) (void)B.value(static_cast<std::size_t>(j));
  }
  FieldKind kind() const { return a3 > 0.0 ? FieldKind::kLognormal : FieldKind::kUniform; }
};

// 1/(2 lambda) = 1-delta when d2 >= 3/2-delta, else d2-1/2.  Both branches
// agree at d2 = 3/2-delta and always land in (1/2, 1].
inline double choose_lambda(double d2, double delta = 0.125) {
  if (!(d2 > 1.0)) throw std::invalid_argument("choose_lambda: need d2 > 1");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("choose_lambda: need delta in (0, 1/2)");
  const double half_inv = d2 >= 1.5 - delta ? 1.0 - delta : d2 - 0.5;
  return 1.0 / (2.0 * half_inv);
}

// Alternative selector keyed by the summability exponent p0 (= 1/d2 for the
// algebraic rule): lambda = 1/(2-2delta) for p0 <= 2/3, else p0/(2-p0).
inline double choose_lambda_p(double p0, double delta = 0.125) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("choose_lambda_p: need p0 in (0,1)");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("choose_lambda_p: need delta in (0, 1/2)");
  return p0 <= 2.0 / 3.0 ? 1.0 / (2.0 - 2.0 * delta) : p0 / (2.0 - p0);
}

inline void check_lambda_range(double lambda, const char* who) {
  if (!(lambda > 0.5 && lambda <= 1.0))
    throw std::domain_error(std::string(who) + ": lambda must lie in (1/2, 1]");
}

// rho(lambda) = 2 zeta(2 lambda) / (2 pi^2)^lambda; rho(1) = 1/6.
inline double rho_lattice(double lambda) {
  check_lambda_range(lambda, "rho_lattice");
  const double pi = 3.14159265358979323846;
  return 2.0 * riemann_zeta(2.0 * lambda) / std::pow(2.0 * pi * pi, lambda);
}

// rho_j(lambda) for the R^s space with exponential weight functions
// exp(-2 alpha_j |y|), eta* = (2 lambda - 1)/(4 lambda).
inline double rho_lognormal(double lambda, double alpha_j) {
  check_lambda_range(lambda, "rho_lognormal");
  if (!(alpha_j > 0.0)) throw std::invalid_argument("rho_lognormal: alpha_j must be positive");
  const double pi = 3.14159265358979323846;
  const double eta = (2.0 * lambda - 1.0) / (4.0 * lambda);
  const double base = std::sqrt(2.0 * pi) * std::exp(alpha_j * alpha_j / eta) /
                      (std::pow(pi, 2.0 - 2.0 * eta) * (1.0 - eta) * eta);
  return 2.0 * std::pow(base, lambda) * riemann_zeta(lambda + 0.5);
}

// Variant for Gaussian weight functions exp(-alpha y^2), alpha < 1/2,
// valid for lambda in (1/(2-2alpha), 1].
inline double rho_lognormal_alt(double lambda, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("rho_lognormal_alt: alpha must lie in (0, 1/2)");
  if (!(lambda > 1.0 / (2.0 - 2.0 * alpha) && lambda <= 1.0))
    throw std::domain_error("rho_lognormal_alt: lambda must lie in (1/(2-2alpha), 1]");
  const double pi = 3.14159265358979323846;
  const double base = std::sqrt(2.0 * pi) / (std::pow(pi, 2.0 - 2.0 * alpha) * (1.0 - alpha) * alpha);
  return 2.0 * std::pow(base, lambda) * riemann_zeta(2.0 * (1.0 - alpha) * lambda);
}

// rho_alpha(lambda) = 2^{alpha lambda (alpha-1)/2} ((1 + 1/(2^{alpha lambda}-2))^alpha - 1)
// for interlaced rules; needs alpha*lambda > 1.
inline double rho_interlaced(int alpha, double lambda) {
  if (alpha < 2) throw std::invalid_argument("rho_interlaced: alpha must be >= 2");
  if (!(lambda > 1.0 / alpha && lambda <= 1.0))
    throw std::domain_error("rho_interlaced: lambda must lie in (1/alpha, 1]");
  const double al = alpha * lambda;
  const double denom = std::pow(2.0, al) - 2.0;
  if (!(denom > 0.0)) throw std::domain_error("rho_interlaced: 2^{alpha lambda} <= 2");
  return std::pow(2.0, al * (alpha - 1) / 2.0) *
         (std::pow(1.0 + 1.0 / denom, alpha) - 1.0);
}

// alpha_j = (a3B + sqrt((a3B)^2 + 1 - 1/(2 lambda)))/2; strictly exceeds a3B
// whenever lambda > 1/2.
inline double weight_alpha_j(double a3B, double lambda) {
  if (a3B < 0.0) throw std::invalid_argument("weight_alpha_j: a3*B_j must be >= 0");
  check_lambda_range(lambda, "weight_alpha_j");
  return 0.5 * (a3B + std::sqrt(a3B * a3B + 1.0 - 1.0 / (2.0 * lambda)));
}

// POD weights gamma_u = Gamma_{|u|} prod_{j in u} Upsilon_j.  Order factors
// are kept in the log domain; (l+a1)! overflows doubles long before the
// dimensions of interest otherwise.
struct PODWeights {
  std::vector<double> log_order_factors;  // log Gamma_0 .. log Gamma_s
  std::vector<double> dim_factors;        // Upsilon_1 .. Upsilon_s
  double lambda = 1.0;

  int dims() const { return static_cast<int>(dim_factors.size()); }
  double log_order_factor(int ell) const {
    return log_order_factors.at(static_cast<std::size_t>(ell));
  }
  // Gamma_ell / Gamma_{ell-1}
  double order_ratio(int ell) const {
    return std::exp(log_order_factor(ell) - log_order_factor(ell - 1));
  }
  bool product_form() const {
    for (double lg : log_order_factors)
      if (lg != 0.0) return false;
    return true;
  }
  double weight(std::span<const int> u) const {
    double lw = log_order_factor(static_cast<int>(u.size()));
    for (int j : u) lw += std::log(dim_factors.at(static_cast<std::size_t>(j - 1)));
    return std::exp(lw);
  }
};

inline double log_factorial_ratio(int ell, int a1) {
  // log((ell+a1)!/a1!)
  return std::lgamma(static_cast<double>(ell + a1) + 1.0) -
         std::lgamma(static_cast<double>(a1) + 1.0);
}

// Weights used for randomly shifted lattice rules:
//   Gamma_l = ((l+a1)!/a1!)^(d1 * 2/(1+lambda))
//   uniform    Upsilon_j = (a2 B_j / sqrt(rho(lambda)))^(2/(1+lambda))
//   lognormal  Upsilon_j = (a2 B_j / (2 e^{(a3B_j)^2/2} Phi(a3B_j)
//                           sqrt((alpha_j - a3B_j) rho_j(lambda))))^(2/(1+lambda))
inline PODWeights pod_weights(const WeightParams& params, double lambda, FieldKind kind) {
  params.validate();
  check_lambda_range(lambda, "pod_weights");
  if (kind == FieldKind::kLognormal && !(params.a3 > 0.0))
    throw std::invalid_argument("pod_weights: lognormal case requires a3 > 0");
  PODWeights w;
  w.lambda = lambda;
  const double expo = 2.0 / (1.0 + lambda);
  w.log_order_factors.resize(static_cast<std::size_t>(params.s) + 1);
  for (int ell = 0; ell <= params.s; ++ell)
    w.log_order_factors[static_cast<std::size_t>(ell)] =
        params.d1 * expo * log_factorial_ratio(ell, params.a1);
  w.dim_factors.resize(static_cast<std::size_t>(params.s));
  const double rho = kind == FieldKind::kUniform ? rho_lattice(lambda) : 0.0;
  for (int j = 1; j <= params.s; ++j) {
    const double bj = params.B.value(static_cast<std::size_t>(j));
    double base;
    if (kind == FieldKind::kUniform) {
      base = params.a2 * bj / std::sqrt(rho);
    } else {
      const double a3b = params.a3 * bj;
      const double aj = weight_alpha_j(a3b, lambda);
      const double rho_j = rho_lognormal(lambda, aj);
      base = params.a2 * bj /
             (2.0 * std::exp(a3b * a3b / 2.0) * normal_cdf(a3b) *
              std::sqrt((aj - a3b) * rho_j));
    }
    w.dim_factors[static_cast<std::size_t>(j - 1)] = std::pow(base, expo);
  }
  return w;
}

// SPOD weights gamma_u = sum_{nu in {1:alpha}^{|u|}} Gamma_{|nu|} prod_j Upsilon_j(nu_j)
// with Gamma_l = ((l+a1)!/a1!)^d1 and Upsilon_j(nu) = 2^{[nu=alpha]} (a2 B_j)^nu.
struct SPODWeights {
  int alpha = 2;
  std::vector<double> log_order_factors;          // log Gamma_0 .. log Gamma_{alpha*s}
  std::vector<std::vector<double>> dim_nu_factors;  // [j-1][nu-1], nu = 1..alpha

  int dims() const { return static_cast<int>(dim_nu_factors.size()); }
  double log_order_factor(int q) const {
    return log_order_factors.at(static_cast<std::size_t>(q));
  }
  double order_ratio_step(int q, int step) const {
    return std::exp(log_order_factor(q + step) - log_order_factor(q));
  }
  double upsilon(int j, int nu) const {
    return dim_nu_factors.at(static_cast<std::size_t>(j - 1)).at(static_cast<std::size_t>(nu - 1));
  }
  // Brute-force expansion over {1:alpha}^{|u|}; intended for small |u|.
  double weight(std::span<const int> u) const {
    const std::size_t k = u.size();
    if (k == 0) return 1.0;
    std::vector<int> nu(k, 1);
    double acc = 0.0;
    while (true) {
      int order = 0;
      double prod = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        order += nu[i];
        prod *= upsilon(u[i], nu[i]);
      }
      acc += std::exp(log_order_factor(order)) * prod;
      std::size_t i = 0;
      for (; i < k; ++i) {
        if (nu[i] < alpha) {
          ++nu[i];
          break;
        }
        nu[i] = 1;
      }
      if (i == k) break;
    }
    return acc;
  }
};

inline SPODWeights spod_weights(const WeightParams& params) {
  params.validate();
  if (params.alpha < 2)
    throw std::invalid_argument("spod_weights: interlacing order alpha must be >= 2");
  SPODWeights w;
  w.alpha = params.alpha;
  const int qmax = params.alpha * params.s;
  w.log_order_factors.resize(static_cast<std::size_t>(qmax) + 1);
  for (int q = 0; q <= qmax; ++q)
    w.log_order_factors[static_cast<std::size_t>(q)] =
        params.d1 * log_factorial_ratio(q, params.a1);
  w.dim_nu_factors.resize(static_cast<std::size_t>(params.s));
  for (int j = 1; j <= params.s; ++j) {
    auto& row = w.dim_nu_factors[static_cast<std::size_t>(j - 1)];
    row.resize(static_cast<std::size_t>(params.alpha));
    for (int nu = 1; nu <= params.alpha; ++nu) {
      const double bj = params.B.value(static_cast<std::size_t>(j), nu);
      row[static_cast<std::size_t>(nu - 1)] =
          (nu == params.alpha ? 2.0 : 1.0) * std::pow(params.a2 * bj, nu);
    }
  }
  return w;
}

// Stechkin-type tail bound:
//   sum_{j>s} B_j <= min(1/(1/p0-1), 1) (sum_j B_j^{p0})^{1/p0} s^{-(1/p0-1)}.
inline double stechkin_tail(const BSequence& B, double p0, long long s) {
  if (!(p0 > 0.0 && p0 < 1.0))
    throw std::invalid_argument("stechkin_tail: p0 must lie in (0,1)");
  if (s < 1) throw std::invalid_argument("stechkin_tail: s must be >= 1");
  const double psum = B.p_sum(p0);  // throws on divergence
  const double rate = 1.0 / p0 - 1.0;
  return std::min(1.0 / rate, 1.0) * std::pow(psum, 1.0 / p0) *
         std::pow(static_cast<double>(s), -rate);
}

inline std::vector<double> read_b_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open b_file '" + path + "'");
  std::vector<double> vals;
  double x;
  while (in >> x) vals.push_back(x);
  if (vals.empty()) throw std::runtime_error("b_file '" + path + "' holds no values");
  return vals;
}

// Plain-text key=value config with the construction-script option names
// (s, m, p, alpha, a1, a2, a3, d1, d2, b, c, b_file, delta).  Lines starting
// with '#' are comments.  Returns the weight parameters; layout keys such as
// m/p are accepted and ignored here.
inline WeightParams parse_weight_config(std::istream& in) {
  WeightParams p;
  bool have_b = false, have_bfile = false, have_c = false, have_d2 = false;
  std::string b_text, b_file;
  double c = 1.0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string v) {
      const auto a = v.find_first_not_of(" \t\r");
      const auto b = v.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "s") p.s = std::stoi(val);
    else if (key == "alpha") p.alpha = std::stoi(val);
    else if (key == "a1") p.a1 = std::stoi(val);
    else if (key == "a2") p.a2 = Expression::parse(val).eval();
    else if (key == "a3") p.a3 = std::stod(val);
    else if (key == "d1") p.d1 = std::stod(val);
    else if (key == "d2") { p.d2 = std::stod(val); have_d2 = true; }
    else if (key == "delta") p.delta = std::stod(val);
    else if (key == "b") { b_text = val; have_b = true; }
    else if (key == "b_file") { b_file = val; have_bfile = true; }
    else if (key == "c") { c = std::stod(val); have_c = true; }
    else if (key == "m" || key == "p" || key == "out") { /* rule layout, not weights */ }
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
  if (have_b && have_bfile)
    throw std::runtime_error("config: give only one of b and b_file");
  if (have_bfile) p.B = BSequence::values(read_b_file(b_file));
  else if (have_b) p.B = BSequence::expression(b_text);
  else p.B = BSequence::rule(have_c ? c : 1.0, have_d2 ? p.d2 : 2.0);
  return p;
}

}  // namespace qmc
