// Command-line front end: construct lattice and interlaced polynomial lattice
// rules, stream their points, and run the 1D elliptic demo studies.

#include "qmc/cbc_lattice.hpp"
#include "qmc/cbc_polylattice.hpp"
#include "qmc/estimators.hpp"
#include "qmc/expr.hpp"
#include "qmc/field.hpp"
#include "qmc/pointgen.hpp"
#include "qmc/rule_io.hpp"
#include "qmc/weights.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

// Missing or contradictory options (exit 2), as opposed to numeric or
// validation failures during the run (exit 3).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  int s = 0;
  int m = 0;
  std::string p;  // prime for lattice rules, modulus polynomial for digital rules
  int alpha = 2;
  int a1 = 0;
  std::string a2 = "1";
  double a3 = 0.0;
  double d1 = 1.0;
  double d2 = 2.0;
  double c = 1.0;
  double delta = 0.125;
  std::string b, b_file, out = ".", config;
};

// Table-2 option set shared by the construction subcommands.  The b option
// accepts expressions in j (and v for the SPOD path, experimental); a2 may be
// an expression such as 1/log(2).
void add_construction_options(CLI::App* cmd, CommonOptions& opt, bool polylattice) {
  cmd->add_option("--s", opt.s, "number of dimensions");
  cmd->add_option("--m", opt.m, "number of points given by 2^m (or p^m with --p)");
  if (polylattice)
    cmd->add_option("--p", opt.p,
                    "modulus polynomial of degree m as an integer bitmask "
                    "(defaults to a built-in irreducible polynomial)");
  else
    cmd->add_option("--p", opt.p, "prime base, n = p^m (defaults to p=2)");
  if (polylattice)
    cmd->add_option("--alpha", opt.alpha, "interlacing factor, >= 2 (default 2)");
  else
    cmd->add_option("--alpha", opt.alpha, "no effect for lattice rules (alpha = 1)");
  cmd->add_option("--a1", opt.a1, "integer offset for the factorial (default 0)");
  cmd->add_option("--a2", opt.a2, "scaling in the product, expression allowed (default 1)");
  cmd->add_option("--a3", opt.a3, "boundary growth factor; 0 selects the uniform case");
  cmd->add_option("--d1", opt.d1, "power on the factorial factor; 0 gives product weights");
  cmd->add_option("--d2", opt.d2, "decay of the B_j sequence, d2 > 1 (default 2)");
  cmd->add_option("--b", opt.b,
                  "B_j sequence as an expression in j (and v, experimental)");
  cmd->add_option("--c", opt.c, "B_j = c*j^-d2 when neither b nor b_file is given");
  cmd->add_option("--b_file", opt.b_file, "file with numerical B_j values, one per line");
  cmd->add_option("--out", opt.out, "output directory (default .)");
  cmd->add_option("--delta", opt.delta, "rate sacrifice delta in (0, 1/2), default 0.125");
  cmd->add_option("--config", opt.config,
                  "key=value config file with the same option names; flags override");
}

qmc::WeightParams resolve_params(const CLI::App* cmd, CommonOptions& opt, bool polylattice) {
  qmc::WeightParams params;
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    if (!in) throw std::runtime_error("cannot open config '" + opt.config + "'");
    params = qmc::parse_weight_config(in);
    // pick up layout keys the weight parser ignores
    std::ifstream again(opt.config);
    std::string line;
    while (std::getline(again, line)) {
      std::istringstream ls(line);
      std::string key;
      if (!std::getline(ls, key, '=')) continue;
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      std::string val;
      std::getline(ls, val);
      if (key == "m" && cmd->count("--m") == 0) opt.m = std::stoi(val);
      if (key == "p" && cmd->count("--p") == 0) opt.p = val;
    }
    if (cmd->count("--s")) params.s = opt.s;
    if (cmd->count("--a1")) params.a1 = opt.a1;
    if (cmd->count("--a2")) params.a2 = qmc::Expression::parse(opt.a2).eval();
    if (cmd->count("--a3")) params.a3 = opt.a3;
    if (cmd->count("--d1")) params.d1 = opt.d1;
    if (cmd->count("--d2")) params.d2 = opt.d2;
    if (cmd->count("--delta")) params.delta = opt.delta;
    if (cmd->count("--b_file"))
      params.B = qmc::BSequence::values(qmc::read_b_file(opt.b_file));
    else if (cmd->count("--b"))
      params.B = qmc::BSequence::expression(opt.b);
    else if ((cmd->count("--c") || cmd->count("--d2")) && params.B.is_rule())
      params.B = qmc::BSequence::rule(cmd->count("--c") ? opt.c : params.B.rule_c(),
                                      params.d2);
  } else {
    params.s = opt.s;
    params.a1 = opt.a1;
    params.a2 = qmc::Expression::parse(opt.a2).eval();
    params.a3 = opt.a3;
    params.d1 = opt.d1;
    params.d2 = opt.d2;
    params.delta = opt.delta;
    if (!opt.b_file.empty() && !opt.b.empty())
      throw UsageError("give only one of --b and --b_file");
    if (!opt.b_file.empty())
      params.B = qmc::BSequence::values(qmc::read_b_file(opt.b_file));
    else if (!opt.b.empty())
      params.B = qmc::BSequence::expression(opt.b);
    else
      params.B = qmc::BSequence::rule(opt.c, opt.d2);
  }
  params.alpha = polylattice ? opt.alpha : 1;
  if (params.s <= 0) throw UsageError("--s is required and must be positive");
  if (opt.m <= 0) throw UsageError("--m is required and must be positive");
  return params;
}

void write_meta(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(dir + "/meta.txt");
  if (!out) throw std::runtime_error("cannot write meta.txt in '" + dir + "'");
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_construct_lattice(const CLI::App* cmd, CommonOptions& opt) {
  qmc::WeightParams params = resolve_params(cmd, opt, false);
  std::uint64_t prime = 2;
  if (!opt.p.empty()) prime = std::stoull(opt.p);
  std::uint64_t n = 1;
  for (int i = 0; i < opt.m; ++i) n *= prime;
  const double lambda = qmc::choose_lambda(params.d2, params.delta);
  const auto kind = params.kind();
  const auto weights = qmc::pod_weights(params, lambda, kind);
  const auto gv = qmc::cbc_construct(n, params.s, weights);
  qmc::write_z_file(opt.out + "/z.txt", gv);
  const double rate = std::min(1.0, params.d2 - 0.5);
  write_meta(opt.out,
             {{"kind", kind == qmc::FieldKind::kUniform ? "uniform" : "lognormal"},
              {"s", std::to_string(params.s)},
              {"m", std::to_string(opt.m)},
              {"p", std::to_string(prime)},
              {"n", std::to_string(n)},
              {"lambda", fmt(lambda)},
              {"delta", fmt(params.delta)},
              {"criterion", fmt(qmc::shift_avg_wce_sq(gv, weights))},
              {"thm1_bound_r1", fmt(qmc::theorem1_bound(weights, n, lambda, 1))},
              {"predicted_rate", "n^-" + fmt(rate)},
              {"b", params.B.describe()}});
  std::cerr << "wrote " << opt.out << "/z.txt (" << params.s << " components, n=" << n
            << ", lambda=" << lambda << ", predicted rate ~ n^-" << rate << ")\n";
  return 0;
}

int run_construct_polylattice(const CLI::App* cmd, CommonOptions& opt) {
  qmc::WeightParams params = resolve_params(cmd, opt, true);
  if (params.alpha < 2)
    throw UsageError("interlacing factor alpha must be at least 2");
  qmc::BinaryPolynomial modulus{0};
  if (!opt.p.empty()) modulus.mask = std::stoull(opt.p, nullptr, 0);
  const auto weights = qmc::spod_weights(params);
  if (params.alpha * opt.m > 64)
    std::cerr << "warning: alpha*m = " << params.alpha * opt.m
              << " exceeds 64 bits; interlaced matrices are truncated\n";
  const auto rule = qmc::cbc_construct_interlaced(opt.m, params.s, params.alpha, weights, modulus);
  qmc::write_rule_files(opt.out, rule);
  write_meta(opt.out, {{"s", std::to_string(params.s)},
                       {"m", std::to_string(opt.m)},
                       {"alpha", std::to_string(params.alpha)},
                       {"modulus", std::to_string(rule.modulus.mask)},
                       {"criterion", fmt(qmc::interlaced_criterion(rule, weights))},
                       {"precision_bits", std::to_string(rule.precision_bits)},
                       {"truncated", rule.truncated ? "1" : "0"},
                       {"b", params.B.describe()}});
  std::cerr << "wrote " << opt.out << "/{Cs,Bs,Bs53,Bs64}.col (s=" << params.s
            << ", m=" << opt.m << ", alpha=" << params.alpha << ")\n";
  return 0;
}

struct GenOptions {
  std::string rule;
  int m = 0;
  int s = 0;
  std::uint64_t offset = 0;
  std::uint64_t count = 0;
  std::string format = "text";
  std::optional<std::uint64_t> shift_seed;
  int interlace = 1;
};

bool looks_like_col(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".col") return true;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') return true;
    std::istringstream ls(line);
    std::string tok;
    int count = 0;
    while (ls >> tok) ++count;
    return count > 1;
  }
  return false;
}

void emit_point(std::span<const double> point, std::span<const std::uint64_t> fixed,
                const std::string& format) {
  if (format == "text") {
    std::string line;
    char buf[64];
    for (std::size_t j = 0; j < point.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", point[j]);
      if (j) line += ' ';
      line += buf;
    }
    line += '\n';
    std::fwrite(line.data(), 1, line.size(), stdout);
  } else {
    std::fwrite(fixed.data(), sizeof(std::uint64_t), fixed.size(), stdout);
  }
}

int run_gen_points(GenOptions& opt) {
  if (opt.format != "text" && opt.format != "bin")
    throw UsageError("--format must be text or bin");
  std::vector<double> shift;
  const bool digital = looks_like_col(opt.rule);

  if (!digital) {
    const auto z = qmc::read_z_file(opt.rule);
    if (opt.m <= 0) throw std::runtime_error("--m is required for lattice rules");
    const int s = opt.s > 0 ? std::min<int>(opt.s, static_cast<int>(z.size()))
                            : static_cast<int>(z.size());
    const std::uint64_t n = std::uint64_t{1} << opt.m;
    qmc::GeneratingVector gv{n, {z.begin(), z.begin() + s}, ""};
    if (opt.count == 0) opt.count = n - opt.offset;
    if (opt.offset + opt.count > n)
      throw std::runtime_error("offset+count exceeds 2^m points");
    if (opt.shift_seed)
      shift = qmc::ShiftSet::generate(*opt.shift_seed, 1, s).deltas[0];
    std::vector<double> t(static_cast<std::size_t>(s));
    std::vector<std::uint64_t> fx(static_cast<std::size_t>(s));
    for (std::uint64_t i = opt.offset; i < opt.offset + opt.count; ++i) {
      qmc::lattice_seq_point(i, gv, opt.m, t);
      if (!shift.empty()) qmc::apply_shift(t, shift);
      for (int j = 0; j < s; ++j)
        fx[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(
            std::ldexp(t[static_cast<std::size_t>(j)], 53)) << 11;
      emit_point(t, fx, opt.format);
    }
    return 0;
  }

  auto file = qmc::read_col_file(opt.rule);
  int m = opt.m > 0 ? opt.m : file.m;
  if (m <= 0 || m > 62) throw std::runtime_error("bad m for digital rule");
  auto mats = std::move(file.matrices);
  if (opt.s > 0 && static_cast<std::size_t>(opt.s) * static_cast<std::size_t>(opt.interlace) <= mats.size())
    mats.resize(static_cast<std::size_t>(opt.s) * static_cast<std::size_t>(opt.interlace));
  if (opt.interlace > 1) {
    for (auto& mat : mats) mat.rows = m;
    mats = qmc::detail::interlace_matrices_capped(mats, opt.interlace, 64);
  }
  const int s = static_cast<int>(mats.size());
  const std::uint64_t n = std::uint64_t{1} << m;
  if (opt.count == 0) opt.count = n - opt.offset;
  if (opt.offset + opt.count > n) throw std::runtime_error("offset+count exceeds 2^m points");
  if (opt.shift_seed) shift = qmc::ShiftSet::generate(*opt.shift_seed, 1, s).deltas[0];
  qmc::DigitalSeqState st(std::move(mats), m, opt.offset);
  std::vector<double> t(static_cast<std::size_t>(s));
  std::vector<std::uint64_t> fx(static_cast<std::size_t>(s));
  for (std::uint64_t i = 0; i < opt.count; ++i) {
    st.current(t);
    for (int j = 0; j < s; ++j)
      fx[static_cast<std::size_t>(j)] = qmc::detail::bit_reverse64(st.state[static_cast<std::size_t>(j)]);
    if (!shift.empty()) qmc::apply_shift(t, shift);
    emit_point(t, fx, opt.format);
    if (st.index + 1 < st.size()) qmc::digital_next_gray(st);
  }
  return 0;
}

struct DemoOptions {
  std::string preset = "uniform-d2-2";
  std::string rule;
  std::string out = "-";
  std::string config;
  int m = 0;        // rule size for digital rules / m_max for lattice
  int m_min = 6;
  int m_max = 10;
  int s = 20;
  int elements = 32;
  int shifts = 16;
  int levels = 0;   // 0 = single-level sweep
  std::uint64_t seed = 1;
};

void apply_demo_config(const CLI::App* cmd, DemoOptions& opt) {
  if (opt.config.empty()) return;
  std::ifstream in(opt.config);
  if (!in) throw std::runtime_error("cannot open config '" + opt.config + "'");
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
    auto overridden = [&](const char* flag) { return cmd->count(flag) > 0; };
    if (key == "preset" && !overridden("--preset")) opt.preset = val;
    else if (key == "rule" && !overridden("--rule")) opt.rule = val;
    else if (key == "out" && !overridden("--out")) opt.out = val;
    else if (key == "m" && !overridden("--m")) opt.m = std::stoi(val);
    else if (key == "m_min" && !overridden("--m_min")) opt.m_min = std::stoi(val);
    else if (key == "m_max" && !overridden("--m_max")) opt.m_max = std::stoi(val);
    else if (key == "s" && !overridden("--s")) opt.s = std::stoi(val);
    else if (key == "elements" && !overridden("--elements")) opt.elements = std::stoi(val);
    else if (key == "shifts" && !overridden("--shifts")) opt.shifts = std::stoi(val);
    else if (key == "levels" && !overridden("--levels")) opt.levels = std::stoi(val);
    else if (key == "seed" && !overridden("--seed")) opt.seed = std::stoull(val);
    else if (key == "preset" || key == "rule" || key == "out") { /* overridden */ }
    else if (cmd->count(("--" + key).c_str()) > 0) { /* flag wins */ }
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
}

// Point source shared by the demo: lattice sequences stream radical-inverse
// prefixes, digital rules stream Gray prefixes.
struct DemoRule {
  bool digital = false;
  qmc::GeneratingVector gv;
  int m_max = 0;
  std::vector<qmc::GF2Matrix> mats;
  int dims = 0;

  void load(const std::string& path, int m_hint, int s_needed) {
    if (path.empty()) throw UsageError("--rule is required for this preset");
    digital = looks_like_col(path);
    if (digital) {
      auto file = qmc::read_col_file(path);
      m_max = m_hint > 0 ? m_hint : file.m;
      mats = std::move(file.matrices);
      dims = static_cast<int>(mats.size());
    } else {
      const auto z = qmc::read_z_file(path);
      if (m_hint <= 0) throw std::runtime_error("--m is required for lattice rules");
      m_max = m_hint;
      gv = qmc::GeneratingVector{std::uint64_t{1} << m_max, z, ""};
      dims = static_cast<int>(z.size());
    }
    if (dims < s_needed)
      throw std::runtime_error("rule has fewer dimensions than the study needs");
    // keep the leading components; CBC rules are extensible in dimension
    if (digital)
      mats.resize(static_cast<std::size_t>(s_needed));
    else
      gv.z.resize(static_cast<std::size_t>(s_needed));
    dims = s_needed;
  }

  void point(std::uint64_t i, std::span<double> out) const {
    if (digital) {
      qmc::digital_point(i ^ (i >> 1), mats, m_max, out);
    } else {
      qmc::lattice_seq_point(i, gv, m_max, out);
    }
  }
};

int run_pde_demo(const CLI::App* cmd, DemoOptions& opt) {
  apply_demo_config(cmd, opt);
  const bool analytic = opt.preset == "uniform-analytic";
  qmc::CoefficientField field = qmc::field_preset(opt.preset);
  field.s = opt.s;
  const auto one = [](double) { return 1.0; };

  DemoRule rule;
  rule.load(opt.rule, opt.m > 0 ? opt.m : opt.m_max, opt.s);

  std::ostringstream csv;
  std::ostringstream summary;

  if (opt.levels <= 0) {
    // single-level sweep over n = 2^{m_min}..2^{m_max}
    if (opt.m_min < 1 || opt.m_max > rule.m_max || opt.m_min + 2 > opt.m_max)
      throw std::runtime_error("bad sweep range; need m_min+2 <= m_max <= rule m");
    std::vector<std::uint64_t> ns;
    for (int mm = opt.m_min; mm <= opt.m_max; ++mm) ns.push_back(std::uint64_t{1} << mm);
    std::vector<double> estimates, stderrs, variances;
    qmc::LevelSpec spec{0, opt.shifts, opt.s, opt.elements};
    std::vector<qmc::LevelSpec> specs{spec};
    qmc::PdeSampler pde(field, one, one, specs);
    const qmc::LevelSampler sampler =
        analytic ? qmc::LevelSampler([](int, std::span<const double>) { return 1.0 / 12.0; })
                 : qmc::LevelSampler(pde);
    for (std::uint64_t n : ns) {
      qmc::EstimatorConfig cfg;
      cfg.levels = {{n, opt.shifts, opt.s, opt.elements}};
      cfg.seed = opt.seed + n;  // fresh shifts per n
      const auto rep = qmc::single_level_estimate(
          sampler,
          [&](int, std::uint64_t i, std::span<double> out) { rule.point(i, out); }, cfg);
      estimates.push_back(rep.estimate);
      stderrs.push_back(rep.std_error);
      variances.push_back(rep.levels[0].variance);
    }
    const double reference = estimates.back();
    std::vector<std::uint64_t> fit_n(ns.begin(), ns.end() - 1);
    std::vector<double> fit_err;
    for (std::size_t i = 0; i + 1 < ns.size(); ++i)
      fit_err.push_back(std::max(std::abs(estimates[i] - reference), 1e-300));
    const auto fit = qmc::fit_log2_rate(fit_n, fit_err);
    csv << "n,estimate,stderr,error,variance,slope\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double err = i + 1 < ns.size() ? std::abs(estimates[i] - reference) : 0.0;
      csv << ns[i] << ',' << fmt(estimates[i]) << ',' << fmt(stderrs[i]) << ','
          << fmt(err) << ',' << fmt(variances[i]) << ',' << fmt(fit.slope) << "\n";
    }
    summary << "single-level sweep preset=" << opt.preset << " s=" << opt.s
            << " elements=" << opt.elements << " r=" << opt.shifts << "\n"
            << "estimate(n=" << ns.back() << ") = " << fmt(reference) << " +- "
            << fmt(stderrs.back()) << "\n"
            << "fitted slope vs reference: " << fmt(fit.slope) << " (se "
            << fmt(fit.slope_se) << ")\n";
  } else {
    // multi-level: n fixed per level, mesh halves per level
    qmc::EstimatorConfig cfg;
    cfg.seed = opt.seed;
    const std::uint64_t n = std::uint64_t{1} << (opt.m > 0 ? opt.m : opt.m_min);
    for (int l = 0; l <= opt.levels; ++l)
      cfg.levels.push_back({n, opt.shifts, opt.s, opt.elements << l});
    qmc::PdeSampler pde(field, one, one, cfg.levels);
    const qmc::LevelSampler sampler =
        analytic ? qmc::LevelSampler([](int, std::span<const double>) { return 1.0 / 12.0; })
                 : qmc::LevelSampler(pde);
    const auto rep = qmc::multi_level_estimate(
        sampler, [&](int, std::uint64_t i, std::span<double> out) { rule.point(i, out); },
        cfg);
    csv << "level,n,elements,s,contribution,stderr,variance,estimate,total_stderr\n";
    for (std::size_t l = 0; l < rep.levels.size(); ++l) {
      const auto& lv = rep.levels[l];
      csv << l << ',' << lv.spec.n << ',' << lv.spec.elements << ',' << lv.spec.s << ','
          << fmt(lv.contribution) << ',' << fmt(lv.std_error) << ',' << fmt(lv.variance)
          << ',' << fmt(rep.estimate) << ',' << fmt(rep.std_error) << "\n";
    }
    summary << "multi-level preset=" << opt.preset << " L=" << opt.levels << " n=" << n
            << " r=" << opt.shifts << "\n"
            << "estimate = " << fmt(rep.estimate) << " +- " << fmt(rep.std_error) << "\n";
    for (std::size_t l = 1; l < rep.levels.size(); ++l)
      if (rep.levels[l - 1].variance > 0.0)
        summary << "variance ratio level " << l << "/" << l - 1 << " = "
                << fmt(rep.levels[l].variance / rep.levels[l - 1].variance) << "\n";
  }

  if (opt.out == "-") {
    std::fputs(csv.str().c_str(), stdout);
  } else {
    std::ofstream out(opt.out);
    if (!out) throw std::runtime_error("cannot write '" + opt.out + "'");
    out << csv.str();
  }
  std::cerr << summary.str();
  return 0;
}

int run_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty report");
  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    std::string tok;
    while (std::getline(hs, tok, ',')) cols.push_back(tok);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> row;
    while (std::getline(ls, tok, ',')) row.push_back(tok.empty() ? 0.0 : std::stod(tok));
    rows.push_back(std::move(row));
  }
  std::printf("report: %zu rows, columns:", rows.size());
  for (const auto& c : cols) std::printf(" %s", c.c_str());
  std::printf("\n");
  auto col_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int ni = col_index("n"), ei = col_index("error");
  if (ni >= 0 && ei >= 0 && rows.size() >= 4) {
    std::vector<std::uint64_t> ns;
    std::vector<double> errs;
    for (const auto& row : rows)
      if (row[static_cast<std::size_t>(ei)] > 0.0) {
        ns.push_back(static_cast<std::uint64_t>(row[static_cast<std::size_t>(ni)]));
        errs.push_back(row[static_cast<std::size_t>(ei)]);
      }
    if (ns.size() >= 3) {
      const auto fit = qmc::fit_log2_rate(ns, errs);
      std::printf("fitted error slope: %.4f (se %.4f)\n", fit.slope, fit.slope_se);
    }
  }
  const int vi = col_index("variance"), li = col_index("level");
  if (vi >= 0 && li >= 0) {
    for (std::size_t r = 1; r < rows.size(); ++r)
      if (rows[r - 1][static_cast<std::size_t>(vi)] > 0.0)
        std::printf("variance ratio level %d/%d: %.4f\n",
                    static_cast<int>(rows[r][static_cast<std::size_t>(li)]),
                    static_cast<int>(rows[r - 1][static_cast<std::size_t>(li)]),
                    rows[r][static_cast<std::size_t>(vi)] /
                        rows[r - 1][static_cast<std::size_t>(vi)]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tailored QMC rule construction, point generation, and PDE demos"};
  app.require_subcommand(1);

  CommonOptions lat_opt, poly_opt;
  auto* lat = app.add_subcommand("construct-lattice",
                                 "CBC construction of a randomly shifted lattice rule "
                                 "(writes z.txt and meta.txt)");
  add_construction_options(lat, lat_opt, false);

  auto* poly = app.add_subcommand("construct-polylattice",
                                  "CBC construction of an interlaced polynomial lattice "
                                  "rule (writes Cs.col, Bs.col, Bs53.col, Bs64.col)");
  add_construction_options(poly, poly_opt, true);

  GenOptions gen_opt;
  auto* gen = app.add_subcommand("gen-points", "stream points of a constructed rule");
  gen->add_option("--rule", gen_opt.rule, "rule file: z.txt-style or .col")->required();
  gen->add_option("--m", gen_opt.m, "log2 points (required for z rules)");
  gen->add_option("--s", gen_opt.s, "leading dimensions to emit (default: all)");
  gen->add_option("--offset", gen_opt.offset, "start index (default 0)");
  gen->add_option("--count", gen_opt.count, "points to emit (default: through 2^m-1)");
  gen->add_option("--format", gen_opt.format, "text (default) or bin");
  gen->add_option("--shift-seed", gen_opt.shift_seed,
                  "emit randomly shifted points from this seed");
  gen->add_option("--interlace", gen_opt.interlace,
                  "interlace consecutive groups of this many rows (for plain Cs.col "
                  "streams, e.g. interlaced Sobol points)");

  DemoOptions demo_opt;
  auto* demo = app.add_subcommand("pde-demo",
                                  "single- or multi-level estimator study on the 1D "
                                  "elliptic presets (CSV report)");
  demo->add_option("--preset", demo_opt.preset,
                   "uniform-analytic | uniform-d2-2 | uniform-d2-3 | lognormal-d2-2 | "
                   "lognormal-d2-3");
  demo->add_option("--rule", demo_opt.rule, "rule file (z.txt-style or .col)");
  demo->add_option("--m", demo_opt.m, "log2 points of the rule");
  demo->add_option("--m_min", demo_opt.m_min, "sweep start (single-level), default 6");
  demo->add_option("--m_max", demo_opt.m_max, "sweep end (single-level), default 10");
  demo->add_option("--s", demo_opt.s, "truncation dimension, default 20");
  demo->add_option("--elements", demo_opt.elements, "mesh elements at level 0, default 32");
  demo->add_option("--shifts", demo_opt.shifts, "random shifts r, default 16");
  demo->add_option("--levels", demo_opt.levels, "L > 0 runs the multi-level estimator");
  demo->add_option("--seed", demo_opt.seed, "shift seed, default 1");
  demo->add_option("--out", demo_opt.out, "CSV path, '-' for stdout (default)");
  demo->add_option("--config", demo_opt.config, "key=value run manifest; flags override");

  std::string report_in;
  auto* rep = app.add_subcommand("report", "summarize a pde-demo CSV report");
  rep->add_option("--in", report_in, "CSV file from pde-demo")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (lat->parsed()) return run_construct_lattice(lat, lat_opt);
    if (poly->parsed()) return run_construct_polylattice(poly, poly_opt);
    if (gen->parsed()) return run_gen_points(gen_opt);
    if (demo->parsed()) return run_pde_demo(demo, demo_opt);
    if (rep->parsed()) return run_report(report_in);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
