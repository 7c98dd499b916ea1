#pragma once

#include "qmc/field.hpp"
#include "qmc/pointgen.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

struct LevelSpec {
  std::uint64_t n = 0;  // points
  int r = 1;            // random shifts
  int s = 0;            // truncation dimension
  int elements = 0;     // mesh elements, h = 1/elements
};

struct EstimatorConfig {
  std::vector<LevelSpec> levels;  // level 0..L
  bool randomized = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (levels.empty()) throw std::invalid_argument("EstimatorConfig: no levels");
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (levels[l].n < 1 || levels[l].s < 1 || levels[l].elements < 2)
        throw std::invalid_argument("EstimatorConfig: bad level spec");
      if (randomized && levels[l].r < 2)
        throw std::invalid_argument("EstimatorConfig: randomized estimates need r >= 2");
      if (l > 0) {
        if (levels[l].s < levels[l - 1].s)
          throw std::invalid_argument("EstimatorConfig: s_l must be non-decreasing");
        if (levels[l].elements < levels[l - 1].elements)
          throw std::invalid_argument("EstimatorConfig: h_l must be non-increasing");
      }
    }
  }
};

struct EstimatorReport {
  double estimate = 0.0;
  double std_error = 0.0;
  struct Level {
    LevelSpec spec;
    double contribution = 0.0;
    double std_error = 0.0;
    double variance = 0.0;           // sample variance of the per-shift values
    std::vector<double> per_shift;   // Q^l(Delta_k)
  };
  std::vector<Level> levels;
};

// The estimators are generic over two callables:
//   sample(level, t) -> double   integrand at cube point t (dimension s_level),
//                                including any uniform/lognormal mapping;
//   point(level, i, out)         unshifted cube point i of the level's rule.
using LevelSampler = std::function<double(int, std::span<const double>)>;
using LevelPointSource = std::function<void(int, std::uint64_t, std::span<double>)>;

namespace detail {
// Independent shifts per level, reproducible from (seed, level, r, s).
inline ShiftSet level_shifts(std::uint64_t seed, int level, int r, int s) {
  return ShiftSet::generate(counter_rng(seed, 0x10000ull + static_cast<std::uint64_t>(level)),
                            r, s);
}
}  // namespace detail

// Telescoping estimator: level l averages G(u^{s_l}_{h_l} - u^{s_{l-1}}_{h_{l-1}})
// with the coarse term at the same cube point truncated to s_{l-1} (and zero
// at level 0).  Accumulation order is fixed: point index, then shift, then
// level.
inline EstimatorReport multi_level_estimate(const LevelSampler& sample,
                                            const LevelPointSource& point,
                                            const EstimatorConfig& config) {
  config.validate();
  EstimatorReport report;
  report.levels.resize(config.levels.size());
  for (int level = 0; level < static_cast<int>(config.levels.size()); ++level) {
    const LevelSpec& spec = config.levels[static_cast<std::size_t>(level)];
    auto& out = report.levels[static_cast<std::size_t>(level)];
    out.spec = spec;
    const int shifts = config.randomized ? spec.r : 1;
    const ShiftSet ss = config.randomized
                            ? detail::level_shifts(config.seed, level, shifts, spec.s)
                            : ShiftSet{};
    const int coarse_s =
        level > 0 ? config.levels[static_cast<std::size_t>(level - 1)].s : 0;
    std::vector<double> t(static_cast<std::size_t>(spec.s));
    out.per_shift.assign(static_cast<std::size_t>(shifts), 0.0);
    for (int k = 0; k < shifts; ++k) {
      double acc = 0.0;
      for (std::uint64_t i = 0; i < spec.n; ++i) {
        point(level, i, t);
        if (config.randomized)
          apply_shift(t, ss.deltas[static_cast<std::size_t>(k)]);
        const double fine = sample(level, t);
        const double coarse =
            level > 0 ? sample(level - 1, std::span<const double>(t).first(
                                              static_cast<std::size_t>(coarse_s)))
                      : 0.0;
        acc += fine - coarse;
      }
      out.per_shift[static_cast<std::size_t>(k)] = acc / static_cast<double>(spec.n);
    }
    if (shifts >= 2) {
      const auto [mean, se] = estimate_with_shifts(out.per_shift);
      out.contribution = mean;
      out.std_error = se;
      out.variance = se * se * static_cast<double>(shifts);
    } else {
      out.contribution = out.per_shift[0];
    }
    report.estimate += out.contribution;
    report.std_error = std::hypot(report.std_error, out.std_error);
  }
  return report;
}

// Single-level estimate; level index 0 throughout.
inline EstimatorReport single_level_estimate(const LevelSampler& sample,
                                             const LevelPointSource& point,
                                             const EstimatorConfig& config) {
  config.validate();
  if (config.levels.size() != 1)
    throw std::invalid_argument("single_level_estimate: exactly one level expected");
  const LevelSpec& spec = config.levels[0];
  EstimatorReport report;
  report.levels.resize(1);
  auto& out = report.levels[0];
  out.spec = spec;
  const int shifts = config.randomized ? spec.r : 1;
  const ShiftSet ss =
      config.randomized ? detail::level_shifts(config.seed, 0, shifts, spec.s) : ShiftSet{};
  std::vector<double> t(static_cast<std::size_t>(spec.s));
  out.per_shift.assign(static_cast<std::size_t>(shifts), 0.0);
  for (int k = 0; k < shifts; ++k) {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < spec.n; ++i) {
      point(0, i, t);
      if (config.randomized) apply_shift(t, ss.deltas[static_cast<std::size_t>(k)]);
      acc += sample(0, t);
    }
    out.per_shift[static_cast<std::size_t>(k)] = acc / static_cast<double>(spec.n);
  }
  if (shifts >= 2) {
    const auto [mean, se] = estimate_with_shifts(out.per_shift);
    out.contribution = mean;
    out.std_error = se;
    out.variance = se * se * static_cast<double>(shifts);
  } else {
    out.contribution = out.per_shift[0];
  }
  report.estimate = out.contribution;
  report.std_error = out.std_error;
  return report;
}

// PDE integrand adapter: cube point -> mapped parameters -> midpoint
// coefficient -> tridiagonal solve -> linear QoI.  One FieldTable per level.
class PdeSampler {
 public:
  PdeSampler(const CoefficientField& field, std::function<double(double)> f,
             std::function<double(double)> g, std::span<const LevelSpec> levels)
      : field_(&field), f_(std::move(f)), g_(std::move(g)) {
    field.validate();
    for (const auto& spec : levels)
      tables_.emplace_back(field, spec.s, spec.elements);
  }

  double operator()(int level, std::span<const double> t_cube) const {
    const FieldTable& table = tables_.at(static_cast<std::size_t>(level));
    std::vector<double> y(t_cube.begin(), t_cube.end());
    if (field_->kind == FieldKind::kUniform)
      map_uniform(y);
    else
      map_lognormal(y);
    std::vector<double> a(static_cast<std::size_t>(table.elements));
    table.coefficient(y, a);
    return qoi(solve_tridiag(a, f_), g_);
  }

 private:
  const CoefficientField* field_;
  std::function<double(double)> f_, g_;
  std::vector<FieldTable> tables_;
};

// Least-squares fit of log2(err) against log2(n).
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::vector<std::uint64_t> n_values;
  std::vector<double> errors;
};

inline RateFit fit_log2_rate(std::span<const std::uint64_t> ns,
                             std::span<const double> errs) {
  if (ns.size() != errs.size() || ns.size() < 3)
    throw std::invalid_argument("fit_log2_rate: need at least 3 samples");
  const std::size_t k = ns.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs(k), ys(k);
  for (std::size_t i = 0; i < k; ++i) {
    xs[i] = std::log2(static_cast<double>(ns[i]));
    if (!(errs[i] > 0.0)) throw std::invalid_argument("fit_log2_rate: nonpositive error");
    ys[i] = std::log2(errs[i]);
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = k * sxx - sx * sx;
  RateFit fit;
  fit.slope = (k * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / k;
  double ssr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += resid * resid;
  }
  if (k > 2) fit.slope_se = std::sqrt(ssr / (k - 2) / (sxx - sx * sx / k));
  fit.n_values.assign(ns.begin(), ns.end());
  fit.errors.assign(errs.begin(), errs.end());
  return fit;
}

// Error sweep over point counts for a fixed integrand on the cube.
//   randomized: per-shift RMS error sqrt(mean_k (Q_k - ref)^2), r shifts;
//   deterministic: |Q - ref|.
struct ConvergenceStudy {
  RateFit fit;
  std::vector<std::vector<double>> per_shift;  // per n
};

inline ConvergenceStudy convergence_study(
    const std::function<double(std::span<const double>)>& integrand, int s,
    const std::function<void(std::uint64_t, std::uint64_t, std::span<double>)>& point,
    std::span<const std::uint64_t> n_values, int r, std::uint64_t seed, double reference,
    bool randomized = true) {
  if (n_values.size() < 3) throw std::invalid_argument("convergence_study: need >= 3 n values");
  std::vector<double> errs;
  ConvergenceStudy study;
  std::vector<double> t(static_cast<std::size_t>(s));
  for (std::uint64_t n : n_values) {
    const int shifts = randomized ? r : 1;
    const ShiftSet ss = ShiftSet::generate(detail::counter_rng(seed, n), shifts, s);
    std::vector<double> q(static_cast<std::size_t>(shifts), 0.0);
    for (int k = 0; k < shifts; ++k) {
      double acc = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) {
        point(n, i, t);
        if (randomized) apply_shift(t, ss.deltas[static_cast<std::size_t>(k)]);
        acc += integrand(t);
      }
      q[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
    }
    double err;
    if (randomized) {
      double ms = 0.0;
      for (double v : q) ms += (v - reference) * (v - reference);
      err = std::sqrt(ms / static_cast<double>(shifts));
    } else {
      err = std::abs(q[0] - reference);
    }
    errs.push_back(std::max(err, 1e-300));
    study.per_shift.push_back(std::move(q));
  }
  study.fit = fit_log2_rate(n_values, errs);
  return study;
}

// Plain Monte Carlo control on the same integrand (r independent n-point
// replications from the counter stream).
inline RateFit mc_control_study(const std::function<double(std::span<const double>)>& integrand,
                                int s, std::span<const std::uint64_t> n_values, int r,
                                std::uint64_t seed, double reference) {
  std::vector<double> errs;
  std::vector<double> t(static_cast<std::size_t>(s));
  std::uint64_t counter = 0;
  for (std::uint64_t n : n_values) {
    double ms = 0.0;
    for (int k = 0; k < r; ++k) {
      double acc = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) {
        for (int j = 0; j < s; ++j)
          t[static_cast<std::size_t>(j)] = detail::counter_uniform(seed, counter++);
        acc += integrand(t);
      }
      const double q = acc / static_cast<double>(n);
      ms += (q - reference) * (q - reference);
    }
    errs.push_back(std::sqrt(ms / static_cast<double>(r)));
  }
  return fit_log2_rate(n_values, errs);
}

// Dimension-truncation study: |Q(G(u^s)) - Q(G(u^ref))| for s in s_list with
// one fixed shifted rule of dimension ref_s; returns decays and the log-log
// slope in s.
struct TruncationStudy {
  std::vector<int> s_values;
  std::vector<double> decays;
  double slope = 0.0;
};

inline TruncationStudy truncation_study(
    const std::function<double(int, std::span<const double>)>& sample_at_dim,
    const std::function<void(std::uint64_t, std::span<double>)>& point, int ref_s,
    std::span<const int> s_list, std::uint64_t n, std::uint64_t seed) {
  TruncationStudy study;
  const ShiftSet ss = ShiftSet::generate(seed, 1, ref_s);
  std::vector<double> t(static_cast<std::size_t>(ref_s));
  std::vector<double> means(s_list.size() + 1, 0.0);
  for (std::uint64_t i = 0; i < n; ++i) {
    point(i, t);
    apply_shift(t, ss.deltas[0]);
    for (std::size_t si = 0; si < s_list.size(); ++si)
      means[si] += sample_at_dim(s_list[si],
                                 std::span<const double>(t).first(
                                     static_cast<std::size_t>(s_list[si])));
    means[s_list.size()] += sample_at_dim(ref_s, t);
  }
  for (double& v : means) v /= static_cast<double>(n);
  std::vector<std::uint64_t> svals;
  std::vector<double> decays;
  for (std::size_t si = 0; si < s_list.size(); ++si) {
    study.s_values.push_back(s_list[si]);
    const double d = std::abs(means[si] - means[s_list.size()]);
    study.decays.push_back(d);
    svals.push_back(static_cast<std::uint64_t>(s_list[si]));
    decays.push_back(std::max(d, 1e-300));
  }
  study.slope = fit_log2_rate(svals, decays).slope;
  return study;
}

// Lagrange-multiplier level planner: proposes n_l minimizing the cost model
// sum_l n_l s_l h_l^{-d} subject to the variance model
// sum_l c_var n_l^{-2 mu} h_{l-1}^4 <= eps^2/2, with h_{-1} = 1.  Values are
// advisory output only.
struct LevelPlan {
  int level;
  double h;
  double n_real;
  std::uint64_t n_pow2;
};

inline std::vector<LevelPlan> plan_levels(double eps, int levels, int mesh_dim, double mu,
                                          double h0, std::span<const int> s_per_level,
                                          double var_scale = 1.0) {
  if (!(eps > 0.0) || levels < 1 || !(mu > 0.0) || !(h0 > 0.0) || mesh_dim < 1)
    throw std::invalid_argument("plan_levels: bad arguments");
  if (static_cast<int>(s_per_level.size()) != levels)
    throw std::invalid_argument("plan_levels: one s per level expected");
  std::vector<double> weight(static_cast<std::size_t>(levels)), cost(static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l) {
    const double h = h0 * std::pow(0.5, l);
    const double h_prev = l == 0 ? 1.0 : h0 * std::pow(0.5, l - 1);
    weight[static_cast<std::size_t>(l)] = var_scale * std::pow(h_prev, 4.0);
    cost[static_cast<std::size_t>(l)] =
        static_cast<double>(s_per_level[l]) * std::pow(h, -static_cast<double>(mesh_dim));
  }
  // n_l = (2 mu w_l / (lambda c_l))^(1/(2mu+1)); pick lambda so the variance
  // budget eps^2/2 is met with equality.
  const double expo = 1.0 / (2.0 * mu + 1.0);
  auto variance_at = [&](double lag) {
    double v = 0.0;
    for (int l = 0; l < levels; ++l) {
      const double n = std::pow(2.0 * mu * weight[static_cast<std::size_t>(l)] /
                                    (lag * cost[static_cast<std::size_t>(l)]),
                                expo);
      v += weight[static_cast<std::size_t>(l)] * std::pow(n, -2.0 * mu);
    }
    return v;
  };
  double lo = 1e-30, hi = 1e30;
  const double budget = eps * eps / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (variance_at(mid) > budget)
      hi = mid;
    else
      lo = mid;
  }
  const double lag = std::sqrt(lo * hi);
  std::vector<LevelPlan> plan;
  for (int l = 0; l < levels; ++l) {
    const double n = std::pow(2.0 * mu * weight[static_cast<std::size_t>(l)] /
                                  (lag * cost[static_cast<std::size_t>(l)]),
                              expo);
    std::uint64_t p2 = 1;
    while (static_cast<double>(p2) < n && p2 < (1ull << 62)) p2 <<= 1;
    plan.push_back({l, h0 * std::pow(0.5, l), n, p2});
  }
  return plan;
}

}  // namespace qmc
