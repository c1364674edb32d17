// gurevic: command-line front end.
//
//   gurevic <subcommand> --config FILE [--out DIR] [--n-max N] [--tol T]
//           [--plot-data] [--budget-entries E]
//
// A short summary goes to stdout; with --out the full results are written
// as JSON / CSV (and .dat with --plot-data). Errors are one JSON object on
// stderr. Exit codes: 0 ok, 2 config, 3 budget, 4 numerical.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gurevic/bip.hpp"
#include "gurevic/config.hpp"
#include "gurevic/equidist.hpp"
#include "gurevic/error.hpp"
#include "gurevic/kernels.hpp"
#include "gurevic/oracle.hpp"
#include "gurevic/transfer.hpp"
#include "gurevic/xi.hpp"
#include "report.hpp"

#ifndef GUREVIC_VERSION
#define GUREVIC_VERSION "dev"
#endif

using namespace gurevic;
using namespace gurevic::cli;

namespace {

constexpr int kOk = 0, kConfig = 2, kBudget = 3, kNumerical = 4;

struct Flags {
  std::string config;
  std::string out;
  std::optional<int> n_max;
  std::optional<double> tol;
  bool plot = false;
  std::optional<std::size_t> budget;
  // subcommand specific
  std::string method = "automatic";
  int l2_n_max = 12;
  int matrix_budget = 4096;
};

// Loaded config plus everything derived from the flags.
struct Run {
  SystemConfig cfg;
  Manifest manifest;
  Writer writer;
  DpOptions dp;
  double tol;

  SkewSystem system() const { return SkewSystem(cfg.shift, cfg.potential, cfg.cocycle); }
  const Options& opt() const { return cfg.options; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run load(const std::string& subcommand, const Flags& f) {
  if (f.config.empty()) throw ConfigError("--config is required");
  std::string text = read_file(f.config);
  Manifest m;
  m.subcommand = subcommand;
  m.config_path = f.config;
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  m.config_hash = hash;
  m.version = GUREVIC_VERSION;
  SystemConfig cfg = [&] {
    Timer t(m, "parse");
    return parse_system(text);
  }();
  for (const auto& kv : cfg.echo) m.parameters.push_back(kv);

  DpOptions dp;
  dp.budget = f.budget.value_or(cfg.options.budget_entries);
  double tol = f.tol.value_or(cfg.options.tol);
  m.parameters.emplace_back("effective.budget_entries", std::to_string(dp.budget));
  m.parameters.emplace_back("effective.tol", fmt(tol));
  if (f.n_max) m.parameters.emplace_back("flag.n_max", std::to_string(*f.n_max));
  m.parameters.emplace_back("flag.plot_data", f.plot ? "true" : "false");
  m.parameters.emplace_back("effective.threads", std::to_string(thread_cap()));
  return Run{std::move(cfg), std::move(m), Writer(f.out, f.plot), dp, tol};
}

ordered_json numbers(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string value_text(const ConstrainedValue& v) { return v.empty() ? "0" : fmt(v.value()); }

ConstraintMode configured_mode(const Run& r, const SkewSystem& sys) {
  std::optional<GroupElement> target;
  if (r.opt().target) target = sys.group().parse(*r.opt().target);
  if (r.opt().cylinder) return ConstraintMode::periodic_cylinder(*r.opt().cylinder, target);
  return ConstraintMode::periodic_all(target);
}

// every mode the config has data for
std::vector<ConstraintMode> configured_modes(const Run& r) {
  std::vector<ConstraintMode> modes{ConstraintMode::periodic_all()};
  const auto& o = r.opt();
  if (o.cylinder) modes.push_back(ConstraintMode::periodic_cylinder(*o.cylinder));
  if (o.base_point) modes.push_back(ConstraintMode::preimage(*o.base_point));
  if (o.cylinder && o.base_point) modes.push_back(ConstraintMode::preimage_cylinder(*o.cylinder, *o.base_point));
  return modes;
}

std::vector<int> configured_n_list(const Run& r, const Flags& f, std::vector<int> fallback) {
  std::vector<int> ns = r.opt().n_list.empty() ? std::move(fallback) : r.opt().n_list;
  if (f.n_max) std::erase_if(ns, [&](int n) { return n > *f.n_max; });
  if (ns.empty()) throw ConfigError("no n values left after applying --n-max");
  return ns;
}

const TestFunction& test_function(const Run& r) {
  if (!r.cfg.test_function) throw ConfigError("config has no [test] section (test function g)");
  return *r.cfg.test_function;
}

std::pair<int, int> n_range(const Run& r, const Flags& f, int default_max) {
  int n_max = f.n_max.value_or(r.opt().n_max > 0 ? r.opt().n_max : default_max);
  int n_min = r.opt().n_min > 0 ? std::min(r.opt().n_min, n_max) : std::max(1, n_max / 2);
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  return {n_min, n_max};
}

ExtensionMethod parse_method(const std::string& s) {
  for (auto m : {ExtensionMethod::automatic, ExtensionMethod::dense, ExtensionMethod::hash, ExtensionMethod::radial,
                 ExtensionMethod::fourier})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown --method '" + s + "'");
}

// ---------------------------------------------------------------- pressure

int cmd_pressure(const Flags& f) {
  auto r = load("pressure", f);
  const auto& shift = r.cfg.shift;
  GibbsMeasure mu;
  {
    Timer t(r.manifest, "gibbs");
    mu = gibbs(shift, r.cfg.potential, {}, {}, r.opt().perron_tol);
  }
  const int n_max = f.n_max.value_or(r.opt().n_max > 0 ? r.opt().n_max : 20);
  std::vector<std::pair<int, double>> periodic;
  {
    Timer t(r.manifest, "periodic");
    periodic = pressure_via_periodic(shift, r.cfg.potential, n_max);
  }

  std::printf("pressure %s\n", fmt(mu.pressure).c_str());
  std::printf("lambda %s  method %s  residual %.3g\n", fmt(std::exp(mu.pressure)).c_str(),
              mu.perron.method.c_str(), mu.perron.residual);
  std::printf("(1/%d) log trace M^%d = %s\n", n_max, n_max, fmt(periodic.back().second).c_str());

  ordered_json body;
  body["pressure"] = num(mu.pressure);
  body["lambda"] = num(std::exp(mu.pressure));
  body["perron_method"] = mu.perron.method;
  body["perron_residual"] = num(mu.perron.residual);
  body["perron_iterations"] = mu.perron.iterations;
  body["second_modulus"] = mu.perron.second_modulus ? num(*mu.perron.second_modulus * std::exp(mu.offset))
                                                    : ordered_json(nullptr);
  body["states"] = shift.size();
  body["transitive"] = shift.transitive();
  body["mixing"] = shift.mixing();
  body["period"] = shift.period();
  body["stationary"] = numbers(mu.stationary);
  // the limsup over the computed range for merely transitive systems
  body["periodic_label"] = shift.mixing() ? "limit" : "limsup";
  Table t{{"n", "log_trace_over_n"}, {}};
  std::vector<std::pair<double, double>> xy;
  for (auto [n, v] : periodic) {
    t.rows.push_back({std::to_string(n), fmt(v)});
    xy.emplace_back(n, v);
  }
  r.writer.json("pressure", r.manifest, body);
  r.writer.csv("pressure_periodic", r.manifest, t);
  r.writer.plot("pressure_periodic", r.manifest, xy);
  return kOk;
}

// ---------------------------------------------------------------------- xi

ordered_json xi_json(const XiResult& xi) {
  ordered_json j;
  j["xi"] = numbers(xi.xi);
  j["gradient_norm"] = num(xi.gradient_norm);
  j["pressure_at_xi"] = num(xi.pressure_at_xi);
  j["hessian_spectrum"] = numbers(xi.hessian_spectrum);
  j["iterations"] = xi.iterations;
  j["start_spread"] = num(xi.start_spread);
  j["starts_agree"] = xi.starts_agree;
  return j;
}

int cmd_xi(const Flags& f) {
  auto r = load("xi", f);
  auto sys = r.system();
  std::optional<double> delta;
  if (r.cfg.family) delta = TruncationFamily::zeta(r.cfg.family->beta).delta();
  AssumptionReport report;
  {
    Timer t(r.manifest, "check_assumptions");
    report = check_assumptions(sys, 8, delta, r.tol, r.opt().seed);
  }
  ordered_json body = report.xi ? xi_json(*report.xi) : ordered_json::object();
  ordered_json a;
  auto status = [](const AssumptionStatus& s) {
    return ordered_json{{"status", to_string(s.status)}, {"evidence", s.evidence}};
  };
  a["mixing"] = status(report.mixing);
  a["summability"] = status(report.summability);
  a["minimum"] = status(report.minimum);
  body["delta"] = num(report.delta);
  body["assumptions"] = a;
  body["dimension"] = sys.rank();
  r.writer.json("xi", r.manifest, body);

  std::printf("d = %d\n", sys.rank());
  std::printf("(I) mixing: %s\n(II) summability: %s (delta %s)\n(III) minimum: %s\n",
              to_string(report.mixing.status).c_str(), to_string(report.summability.status).c_str(),
              fmt(report.delta).c_str(), to_string(report.minimum.status).c_str());
  if (!report.xi) throw ConvergenceError("no minimizer of p: " + report.minimum.evidence, 0.0);
  std::printf("xi =");
  for (double x : report.xi->xi) std::printf(" %s", fmt(x).c_str());
  std::printf("\np(xi) = %s  |grad| = %.3g\n", fmt(report.xi->pressure_at_xi).c_str(), report.xi->gradient_norm);
  return kOk;
}

// --------------------------------------------------------------- extension

ordered_json estimate_json(const PressureEstimate& e) {
  ordered_json j;
  j["method"] = e.method;
  j["estimate"] = num(e.estimate);
  j["uncertainty"] = num(e.uncertainty);
  j["log_exponent"] = num(e.log_exponent);
  j["last_value"] = num(e.last_value);
  j["lower_bound"] = e.lower_bounds.empty() ? ordered_json(nullptr) : num(e.lower_bounds.back());
  j["lower_certified"] = e.lower_certified;
  j["upper_bound"] = num(e.upper_bound);
  j["prediction"] = e.prediction_flag;
  return j;
}

Table sequence_table(const PressureEstimate& e) {
  Table t{{"n", "Z_n", "log_Z_n_over_n", "method", "ball_size", "lower_bound"}, {}};
  for (std::size_t k = 0; k < e.sequence.size(); ++k) {
    const auto& v = e.sequence[k];
    t.rows.push_back({std::to_string(v.n), value_text(v), v.empty() ? "-inf" : fmt(v.rate()), v.method,
                      std::to_string(v.ball_size), k < e.lower_bounds.size() ? fmt(e.lower_bounds[k]) : "nan"});
  }
  return t;
}

std::vector<std::pair<double, double>> rate_points(const PressureEstimate& e) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& v : e.sequence)
    if (!v.empty()) xy.emplace_back(v.n, v.rate());
  return xy;
}

int cmd_extension(const Flags& f) {
  auto r = load("extension", f);
  auto sys = r.system();
  auto [n_min, n_max] = n_range(r, f, 40);
  auto mode = configured_mode(r, sys);
  r.manifest.parameters.emplace_back("effective.n_range", std::to_string(n_min) + ".." + std::to_string(n_max));
  r.manifest.parameters.emplace_back("effective.mode", mode.name());
  r.manifest.parameters.emplace_back("flag.method", f.method);
  r.manifest.parameters.emplace_back("flag.l2_n_max", std::to_string(f.l2_n_max));
  PressureEstimate est;
  {
    Timer t(r.manifest, "extension_pressure");
    est = extension_pressure(sys, n_min, n_max, mode, parse_method(f.method), r.dp);
  }
  std::vector<std::pair<int, double>> l2;
  if (f.l2_n_max > 0) {
    Timer t(r.manifest, "l2_norm_growth");
    l2 = l2_norm_growth(sys, f.l2_n_max, r.opt().cylinder.value_or(0), r.dp);
  }

  std::printf("group %s  mode %s  n in [%d, %d]  method %s\n", sys.group().name().c_str(), mode.name().c_str(), n_min,
              n_max, est.method.c_str());
  std::printf("estimate %s +- %s%s\n", fmt(est.estimate).c_str(), fmt(est.uncertainty).c_str(),
              est.prediction_flag ? "  (prediction)" : "");
  std::printf("last value %s  lower bound %s%s  upper bound %s\n", fmt(est.last_value).c_str(),
              est.lower_bounds.empty() ? "nan" : fmt(est.lower_bounds.back()).c_str(),
              est.lower_certified ? " (certified)" : "", fmt(est.upper_bound).c_str());
  if (!l2.empty()) std::printf("l2 growth at n = %d: %s\n", l2.back().first, fmt(l2.back().second).c_str());

  ordered_json body = estimate_json(est);
  ordered_json l2j = ordered_json::array();
  Table lt{{"n", "l2_growth"}, {}};
  std::vector<std::pair<double, double>> lxy;
  for (auto [n, v] : l2) {
    l2j.push_back({{"n", n}, {"value", num(v)}});
    lt.rows.push_back({std::to_string(n), fmt(v)});
    lxy.emplace_back(n, v);
  }
  body["l2_growth"] = l2j;
  r.writer.json("extension", r.manifest, body);
  r.writer.csv("extension", r.manifest, sequence_table(est));
  r.writer.plot("extension", r.manifest, rate_points(est));
  if (!l2.empty()) {
    r.writer.csv("extension_l2", r.manifest, lt);
    r.writer.plot("extension_l2", r.manifest, lxy);
  }
  return kOk;
}

// ---------------------------------------------------------------- equidist

int cmd_equidist(const Flags& f) {
  auto r = load("equidist", f);
  auto sys = r.system();
  const auto& g = test_function(r);
  auto ns = configured_n_list(r, f, {10, 20});
  auto modes = configured_modes(r);
  EquidistReport report;
  {
    Timer t(r.manifest, "equidist_report");
    report = equidist_report(sys, g.values, ns, modes, r.dp);
  }
  std::printf("limit %s  (xi =", fmt(report.limit).c_str());
  for (double x : report.xi) std::printf(" %s", fmt(x).c_str());
  std::printf(")\n%-18s %5s %14s %14s\n", "mode", "n", "empirical", "|diff|");
  Table t{{"mode", "n", "g_name", "empirical", "limit", "abs_diff", "note"}, {}};
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    std::printf("%-18s %5d %14s %14s %s\n", row.mode.c_str(), row.n, fmt(row.empirical).c_str(),
                fmt(row.abs_diff).c_str(), row.error.c_str());
    t.rows.push_back({row.mode, std::to_string(row.n), g.name, fmt(row.empirical), fmt(row.limit),
                      fmt(row.abs_diff), row.error});
    rows.push_back({{"mode", row.mode}, {"n", row.n}, {"empirical", num(row.empirical)},
                    {"abs_diff", num(row.abs_diff)}, {"note", row.error}});
  }
  ordered_json body;
  body["g_name"] = g.name;
  body["xi"] = numbers(report.xi);
  body["limit"] = num(report.limit);
  body["rows"] = rows;
  r.writer.json("equidist", r.manifest, body);
  r.writer.csv("equidist", r.manifest, t);
  std::vector<std::pair<double, double>> xy;
  for (const auto& row : report.rows)
    if (row.mode == modes.front().name()) xy.emplace_back(row.n, row.abs_diff);
  r.writer.plot("equidist", r.manifest, xy);
  return kOk;
}

// ---------------------------------------------------------------------- ld

int cmd_ld(const Flags& f) {
  auto r = load("ld", f);
  auto sys = r.system();
  const auto& g = test_function(r);
  auto ns = configured_n_list(r, f, {8, 10, 12, 14, 16});
  auto mode = configured_mode(r, sys);
  LdReport report;
  {
    Timer t(r.manifest, "ld_tail");
    report = ld_tail(sys, g.values, r.opt().epsilon, ns, mode, std::nullopt, r.dp);
  }
  std::printf("limit %s  epsilon %s  mode %s\n", fmt(report.limit).c_str(), fmt(r.opt().epsilon).c_str(),
              mode.name().c_str());
  const double eta = report.fit ? report.fit->eta : std::nan("");
  const double residual = report.fit ? report.fit->residual : std::nan("");
  Table t{{"mode", "n", "g_name", "epsilon", "tail_mass", "eta_fit", "residual", "method"}, {}};
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    std::printf("n %4d  tail %s  [%s]\n", row.n, fmt(row.tail_mass).c_str(), row.method.c_str());
    t.rows.push_back({mode.name(), std::to_string(row.n), g.name, fmt(row.epsilon), fmt(row.tail_mass), fmt(eta),
                      fmt(residual), row.method});
    rows.push_back({{"n", row.n}, {"tail_mass", num(row.tail_mass)}, {"method", row.method}});
  }
  if (report.fit)
    std::printf("eta %s  R^2 %s  points %d\n", fmt(eta).c_str(), fmt(report.fit->r_squared).c_str(),
                report.fit->points);
  else
    std::printf("eta: no fit (fewer than two rows with positive tail mass)\n");

  ordered_json body;
  body["g_name"] = g.name;
  body["mode"] = mode.name();
  body["epsilon"] = num(r.opt().epsilon);
  body["limit"] = num(report.limit);
  body["rows"] = rows;
  if (report.fit)
    body["fit"] = {{"eta", num(eta)},
                   {"intercept", num(report.fit->intercept)},
                   {"r_squared", num(report.fit->r_squared)},
                   {"residual", num(residual)},
                   {"points", report.fit->points}};
  else
    body["fit"] = nullptr;
  r.writer.json("ld", r.manifest, body);
  r.writer.csv("ld", r.manifest, t);
  std::vector<std::pair<double, double>> xy;
  for (const auto& row : report.rows)
    if (row.tail_mass > 0.0) xy.emplace_back(row.n, std::log(row.tail_mass));
  r.writer.plot("ld", r.manifest, xy);
  return kOk;
}

// --------------------------------------------------------- amenability-gap

int cmd_gap(const Flags& f) {
  auto r = load("amenability-gap", f);
  auto sys = r.system();
  auto [n_min, n_max] = n_range(r, f, 40);
  r.manifest.parameters.emplace_back("effective.n_range", std::to_string(n_min) + ".." + std::to_string(n_max));
  PressureEstimate g, ab;
  {
    Timer t(r.manifest, "extension_G");
    g = extension_pressure(sys, n_min, n_max, ConstraintMode::periodic_all(), ExtensionMethod::automatic, r.dp);
  }
  {
    Timer t(r.manifest, "extension_Gbar");
    ab = extension_pressure(sys.abelianized(), n_min, n_max, ConstraintMode::periodic_all(),
                            ExtensionMethod::automatic, r.dp);
  }
  const double gap = ab.estimate - g.estimate;
  const double width = g.uncertainty + ab.uncertainty;
  const bool strict = gap > width;
  const char* verdict = strict ? "gap exceeds the bracket width: strict inequality (non-amenable behaviour)"
                               : "gap within the bracket width: consistent with equality (amenable behaviour)";
  std::printf("G    = %-12s estimate %s +- %s  [%s]\n", sys.group().name().c_str(), fmt(g.estimate).c_str(),
              fmt(g.uncertainty).c_str(), g.method.c_str());
  std::printf("Gbar = Z^%-10d estimate %s +- %s  [%s]\n", sys.rank(), fmt(ab.estimate).c_str(),
              fmt(ab.uncertainty).c_str(), ab.method.c_str());
  std::printf("gap %s  bracket width %s\n%s\n", fmt(gap).c_str(), fmt(width).c_str(), verdict);

  ordered_json body;
  body["G"] = estimate_json(g);
  body["Gbar"] = estimate_json(ab);
  body["gap"] = num(gap);
  body["bracket_width"] = num(width);
  body["strict"] = strict;
  body["verdict"] = verdict;
  r.writer.json("amenability_gap", r.manifest, body);
  r.writer.csv("amenability_gap_G", r.manifest, sequence_table(g));
  r.writer.csv("amenability_gap_Gbar", r.manifest, sequence_table(ab));
  r.writer.plot("amenability_gap_G", r.manifest, rate_points(g));
  r.writer.plot("amenability_gap_Gbar", r.manifest, rate_points(ab));
  return kOk;
}

// ------------------------------------------------------------- bip-converge

int cmd_bip(const Flags& f) {
  auto r = load("bip-converge", f);
  if (!r.cfg.family) throw ConfigError("config has no [family] section");
  auto family = TruncationFamily::zeta(r.cfg.family->beta);
  auto sizes = r.cfg.family->sizes;
  if (f.n_max) std::erase_if(sizes, [&](int n) { return n > *f.n_max; });
  r.manifest.parameters.emplace_back("flag.matrix_budget", std::to_string(f.matrix_budget));
  std::vector<ConvergenceRow> rows;
  {
    Timer t(r.manifest, "convergence_report");
    rows = convergence_report(family, sizes, f.matrix_budget, r.tol);
  }
  const double limit = std::log(family.partition_sum());
  std::printf("family %s beta %s  delta %s  limit log(sum e^phi) = %s\n", family.name().c_str(),
              fmt(family.beta()).c_str(), fmt(family.delta()).c_str(), fmt(limit).c_str());
  std::printf("%6s %16s %16s %16s %14s\n", "N", "pressure", "p_N(xi_N)", "xi_N", "limit - P_N");
  Table t{{"N", "pressure", "pressure_at_xi", "xi", "delta", "increment", "tail", "upper_envelope", "gap_to_limit"}, {}};
  ordered_json js = ordered_json::array();
  std::vector<std::pair<double, double>> xy;
  for (const auto& row : rows) {
    std::printf("%6d %16s %16s %16s %14s\n", row.size, fmt(row.pressure).c_str(), fmt(row.pressure_at_xi).c_str(),
                fmt(row.xi).c_str(), fmt(limit - row.pressure).c_str());
    t.rows.push_back({std::to_string(row.size), fmt(row.pressure), fmt(row.pressure_at_xi), fmt(row.xi),
                      fmt(row.delta), fmt(row.increment), fmt(row.tail), fmt(row.upper_envelope),
                      fmt(limit - row.pressure)});
    js.push_back({{"N", row.size},
                  {"pressure", num(row.pressure)},
                  {"pressure_at_xi", num(row.pressure_at_xi)},
                  {"xi", num(row.xi)},
                  {"delta", num(row.delta)},
                  {"increment", num(row.increment)},
                  {"tail", num(row.tail)},
                  {"upper_envelope", num(row.upper_envelope)}});
    xy.emplace_back(row.size, row.pressure);
  }
  ordered_json body;
  body["family"] = family.name();
  body["beta"] = num(family.beta());
  body["delta"] = num(family.delta());
  body["limit"] = num(limit);
  body["rows"] = js;
  r.writer.json("bip_converge", r.manifest, body);
  r.writer.csv("bip_converge", r.manifest, t);
  r.writer.plot("bip_converge", r.manifest, xy);
  return kOk;
}

// ------------------------------------------------------------------ oracle

struct OracleCheck {
  std::string name;
  std::string mode;
  int n;
  double fast;
  double brute;
};

bool agrees(double fast, double brute, double rel) {
  if (std::isnan(brute)) return std::isnan(fast);
  if (brute == 0.0) return fast == 0.0;
  return std::abs(fast - brute) <= rel * std::abs(brute);
}

int cmd_oracle(const Flags& f) {
  auto r = load("oracle", f);
  auto sys = r.system();
  const int n_max = std::min(f.n_max.value_or(8), r.opt().oracle_ceiling);
  const int ceiling = r.opt().oracle_ceiling;
  std::vector<OracleCheck> checks;
  auto modes = configured_modes(r);
  {
    Timer t(r.manifest, "constrained_sums");
    for (const auto& mode : modes)
      for (int n = 1; n <= n_max; ++n)
        checks.push_back({"constrained_sum", mode.name(), n, constrained_sum(sys, n, mode, r.dp).value(),
                          oracle::constrained_sum(sys, n, mode, ceiling)});
  }
  if (r.cfg.test_function) {
    Timer t(r.manifest, "empirical_integrals");
    const auto& g = r.cfg.test_function->values;
    for (const auto& mode : modes)
      for (int n = 1; n <= n_max; ++n)
        checks.push_back({"empirical_integral", mode.name(), n, empirical_integral(sys, mode, n, g, r.dp).value,
                          oracle::empirical_integral(sys, n, mode, g, ceiling)});
  }
  {
    Timer t(r.manifest, "traces");
    auto ab = sys.abelianized();
    std::vector<double> w(ab.rank(), 0.1), tp(ab.rank(), 0.3);
    auto traces = trace_powers(build_operator(sys.shift(), sys.potential(), ab.displacement(), w, tp), n_max);
    for (int n = 1; n <= n_max; ++n) {
      auto brute = oracle::twisted_periodic_sum(sys.shift(), sys.potential(), ab.displacement(), w, tp, n, ceiling);
      // compare the complex values through their distance
      double scale = std::max(1.0, std::abs(brute));
      checks.push_back({"twisted_trace", "periodic", n, 1.0 + std::abs(traces[n - 1] - brute) / scale, 1.0});
    }
  }
  if (sys.rank() > 0) {
    Timer t(r.manifest, "fourier");
    auto ab = sys.abelianized();
    const int nf = std::min(n_max + 2, 12);
    auto fourier = fourier_sequence(ab, nf, std::vector<std::int64_t>(ab.rank(), 0));
    for (int n = 1; n <= nf; ++n)
      checks.push_back({"fourier_vs_dp", "periodic", n, fourier[n - 1].value(),
                        constrained_sum(ab, n, ConstraintMode::periodic_all(), r.dp).value()});
  }

  int failed = 0;
  Table t{{"check", "mode", "n", "fast", "reference", "pass"}, {}};
  ordered_json rows = ordered_json::array();
  for (const auto& c : checks) {
    const double rel = c.name == "fourier_vs_dp" ? 1e-8 : (c.name == "twisted_trace" ? 1e-9 : 1e-10);
    bool ok = agrees(c.fast, c.brute, rel);
    failed += !ok;
    t.rows.push_back({c.name, c.mode, std::to_string(c.n), fmt(c.fast), fmt(c.brute), ok ? "pass" : "FAIL"});
    rows.push_back({{"check", c.name}, {"mode", c.mode}, {"n", c.n}, {"fast", num(c.fast)},
                    {"reference", num(c.brute)}, {"pass", ok}});
    if (!ok)
      std::printf("FAIL %s %s n=%d fast %s reference %s\n", c.name.c_str(), c.mode.c_str(), c.n, fmt(c.fast).c_str(),
                  fmt(c.brute).c_str());
  }
  std::printf("oracle: %zu checks, %d failed (n <= %d, modes:", checks.size(), failed, n_max);
  for (const auto& m : modes) std::printf(" %s", m.name().c_str());
  std::printf(")\n");
  ordered_json body;
  body["checks"] = checks.size();
  body["failed"] = failed;
  body["rows"] = rows;
  r.writer.json("oracle", r.manifest, body);
  r.writer.csv("oracle", r.manifest, t);
  if (failed > 0) throw ConvergenceError(std::to_string(failed) + " oracle checks disagree", failed);
  return kOk;
}

// ------------------------------------------------------------------ errors

int report_error(const std::exception& e, int code, const std::string& kind) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = e.what();
  j["exit_code"] = code;
  if (auto* c = dynamic_cast<const ConfigError*>(&e); c && c->line() > 0) {
    j["line"] = c->line();
    j["column"] = c->column();
  }
  if (auto* b = dynamic_cast<const BudgetError*>(&e)) {
    j["requested_entries"] = b->requested();
    j["budget_entries"] = b->budget();
  }
  std::cerr << j.dump() << std::endl;
  return code;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return report_error(e, kConfig, e.kind());
  } catch (const ContractError& e) {
    // reachable only through inputs (flags, config values)
    return report_error(e, kConfig, e.kind());
  } catch (const BudgetError& e) {
    return report_error(e, kBudget, e.kind());
  } catch (const ConvergenceError& e) {
    return report_error(e, kNumerical, e.kind());
  } catch (const std::exception& e) {
    return report_error(e, 1, "internal");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gurevic pressure of group extensions of countable Markov shifts"};
  app.set_version_flag("--version", GUREVIC_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "system config file");
  app.add_option("--out", f.out, "directory for JSON/CSV output");
  app.add_option("--n-max", f.n_max, "largest n (or truncation size)");
  app.add_option("--tol", f.tol, "solver tolerance");
  app.add_flag("--plot-data", f.plot, "also write gnuplot two-column .dat files");
  app.add_option("--budget-entries", f.budget, "DP entry budget");

  std::function<int()> run;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Flags&)) {
    auto* s = app.add_subcommand(name, help);
    s->callback([&, fn] { run = [&, fn] { return fn(f); }; });
    return s;
  };
  sub("pressure", "Gurevic pressure, Perron data, periodic-point rates", cmd_pressure);
  sub("xi", "minimizer of p(w) and assumption checks", cmd_xi);
  auto* ext = sub("extension", "extension pressure sequence and l2 growth", cmd_extension);
  ext->add_option("--method", f.method, "automatic, dense, hash, radial or fourier");
  ext->add_option("--l2-n-max", f.l2_n_max, "steps of the l2 growth diagnostic (0 skips it)");
  sub("equidist", "empirical measures against mu^xi", cmd_equidist);
  sub("ld", "large-deviation tail masses and fitted rate", cmd_ld);
  sub("amenability-gap", "extension pressure of G and of its abelianization", cmd_gap);
  auto* bip = sub("bip-converge", "truncation convergence of a countable family", cmd_bip);
  bip->add_option("--matrix-budget", f.matrix_budget, "largest truncation size");
  sub("oracle", "fast paths against brute-force enumeration", cmd_oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report_error(e, kConfig, "usage");
  }
  return guarded(run);
}
