#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gurevic/error.hpp"
#include "gurevic/indexed_ball.hpp"
#include "gurevic/skewprod.hpp"
#include "gurevic/xi.hpp"
#include "skew_internal.hpp"

namespace gurevic {

std::string to_string(ExtensionMethod method) {
  switch (method) {
    case ExtensionMethod::automatic:
      return "automatic";
    case ExtensionMethod::dense:
      return "dense-dp";
    case ExtensionMethod::hash:
      return "hash-dp";
    case ExtensionMethod::radial:
      return "radial";
    case ExtensionMethod::fourier:
      return "fourier";
  }
  return "?";
}

std::optional<GrowthFit> fit_growth(const std::vector<int>& n, const std::vector<double>& log_z) {
  if (n.size() != log_z.size()) throw ContractError("fit inputs differ in length");
  if (n.size() < 3) return std::nullopt;
  Eigen::MatrixXd a(n.size(), 3);
  Eigen::VectorXd b(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) {
    a(k, 0) = n[k];
    a(k, 1) = std::log(static_cast<double>(n[k]));
    a(k, 2) = 1.0;
    b(k) = log_z[k];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) return std::nullopt;
  Eigen::VectorXd x = qr.solve(b);
  return GrowthFit{x(0), x(1), x(2)};
}

namespace {

std::vector<ConstrainedValue> raw_sequence(const SkewSystem& sys, int n_max,
                                           const ConstraintMode& mode, ExtensionMethod& method,
                                           const DpOptions& options) {
  const GroupElement target = detail::target_of(sys, mode);
  const bool identity = is_identity(target);
  const auto kind = sys.group().kind();
  const bool abelian = kind == GroupKind::lattice || kind == GroupKind::cyclic;
  if (method == ExtensionMethod::automatic) {
    if (mode.kind == ConstraintMode::Kind::periodic_all && identity && radial_applicable(sys))
      method = ExtensionMethod::radial;
    else if (mode.kind == ConstraintMode::Kind::periodic_all && kind == GroupKind::lattice)
      method = ExtensionMethod::fourier;
    else
      method = ExtensionMethod::dense;
  }
  switch (method) {
    case ExtensionMethod::radial:
      if (mode.kind != ConstraintMode::Kind::periodic_all || !identity)
        throw ContractError("radial path only counts identity returns of all periodic points");
      return free_group_radial_sequence(sys, n_max);
    case ExtensionMethod::fourier: {
      if (mode.kind != ConstraintMode::Kind::periodic_all || kind != GroupKind::lattice)
        throw ContractError("Fourier path needs a Z^d cocycle and the periodic mode");
      return fourier_sequence(sys, n_max, std::get<LatticeElement>(target).coords, 0, {},
                              options.exec);
    }
    case ExtensionMethod::dense:
      if (mode.periodic() && (identity || abelian)) return constrained_sequence(sys, n_max, mode, options);
      [[fallthrough]];
    case ExtensionMethod::hash:
    default: {
      DpOptions o = options;
      o.method = method == ExtensionMethod::hash ? DpMethod::hash : DpMethod::dense;
      std::vector<ConstrainedValue> out;
      for (int n = 1; n <= n_max; ++n) out.push_back(constrained_sum(sys, n, mode, o));
      return out;
    }
  }
}

}  // namespace

PressureEstimate extension_pressure(const SkewSystem& sys, int n_min, int n_max,
                                    const ConstraintMode& mode, ExtensionMethod method,
                                    const DpOptions& options) {
  if (n_min < 1 || n_max < n_min) throw ContractError("need 1 <= n_min <= n_max");
  mode.validate(sys);
  PressureEstimate out;
  auto all = raw_sequence(sys, n_max, mode, method, options);
  out.method = to_string(method);
  for (const auto& v : all)
    if (v.n >= n_min) out.sequence.push_back(v);

  std::vector<int> ns, ns_upper;
  std::vector<double> logs, logs_upper;
  const int mid = (n_min + n_max + 1) / 2;
  for (const auto& v : out.sequence) {
    if (v.empty()) continue;
    ns.push_back(v.n);
    logs.push_back(v.log_value);
    if (v.n >= mid) {
      ns_upper.push_back(v.n);
      logs_upper.push_back(v.log_value);
    }
    out.last_value = v.rate();
  }
  if (ns.empty()) throw ConvergenceError("every constrained sum in the range is zero", 0.0);

  auto whole = fit_growth(ns, logs);
  auto upper = fit_growth(ns_upper, logs_upper);
  if (upper && whole) {
    out.estimate = upper->slope;
    out.log_exponent = upper->log_exponent;
    out.uncertainty = std::abs(upper->slope - whole->slope);
  } else {
    out.estimate = out.last_value;
    out.uncertainty = ns.size() > 1 ? std::abs(logs.back() / ns.back() - logs[ns.size() - 2] / ns[ns.size() - 2])
                                    : std::numeric_limits<double>::infinity();
  }

  // supermultiplicativity: Z_{m+n} >= e^{-2D} Z_m Z_n for concatenated
  // identity-return periodic words on a full shift
  const GroupElement target = detail::target_of(sys, mode);
  out.lower_certified = sys.shift().full_shift() && mode.periodic() && is_identity(target);
  const double d = sys.potential().row_oscillation(sys.shift());
  double best = kMinusInfinity;
  for (const auto& v : out.sequence) {
    if (!v.empty()) best = std::max(best, (v.log_value - 2.0 * d) / v.n);
    out.lower_bounds.push_back(best);
  }

  if (sys.shift().transitive()) {
    if (sys.rank() == 0) {
      out.upper_bound = pressure(sys.shift(), sys.potential());
    } else {
      PressureFunction p(sys);
      out.upper_bound = find_xi(p).pressure_at_xi;
    }
  } else {
    out.upper_bound = std::numeric_limits<double>::quiet_NaN();
  }
  out.prediction_flag = sys.group().kind() != GroupKind::lattice;
  return out;
}

namespace {

// Forward layers of paths started in cylinder a: after k symbols, entry
// (i, g) holds the scaled weight of words w_1..w_k with w_1 = a, w_k = i and
// psi_k(w) = g. Calls visit(k, layer) for k = 1..n_max.
template <typename Visit>
void forward_from_cylinder(const SkewSystem& sys, int a, int n_max, const IndexedBall& ball,
                           const std::vector<double>& weights, const DpOptions& options,
                           Visit&& visit) {
  const int s = sys.shift().size();
  BallStep step;
  step.states = s;
  step.size = ball.size();
  step.weight = weights;
  step.lengths = &ball.lengths();
  for (int j = 0; j < s; ++j)
    step.pull.push_back(ball.right_multiplication(inverse(sys.cocycle().values[j])));
  const std::size_t layer = static_cast<std::size_t>(s) * ball.size();
  std::vector<double> cur(layer, 0.0), next(layer, 0.0);
  auto start = ball.index_of(sys.cocycle().values[a]);
  if (start >= 0) cur[a * ball.size() + start] = 1.0;
  visit(1, cur);
  for (int k = 2; k <= n_max; ++k) {
    ball_step(step, cur, next, ball.radius(), options.exec);
    std::swap(cur, next);
    visit(k, cur);
  }
}

IndexedBall ball_for(const SkewSystem& sys, int n_max, const DpOptions& options, const char* what) {
  const int radius = n_max * std::max(1, sys.cocycle().max_step_length());
  IndexedBall ball(sys.group(), radius, options.budget);
  const std::size_t entries = static_cast<std::size_t>(sys.shift().size()) * ball.size() * 3;
  if (entries > options.budget)
    throw BudgetError(std::string(what) + " to n = " + std::to_string(n_max), entries,
                      options.budget);
  return ball;
}

}  // namespace

std::vector<std::pair<int, double>> l2_norm_growth(const SkewSystem& sys, int n_max, int cylinder,
                                                   const DpOptions& options) {
  if (n_max < 1) throw ContractError("n_max must be >= 1");
  if (cylinder < 0 || cylinder >= sys.shift().size()) throw ContractError("cylinder out of range");
  const double c = detail::scaling_constant(sys);
  const auto weights = detail::scaled_weights(sys, c);
  auto ball = ball_for(sys, n_max, options, "l2 norm growth");
  const int s = sys.shift().size();
  const std::size_t b = ball.size();

  std::vector<std::pair<int, double>> out;
  forward_from_cylinder(sys, cylinder, n_max, ball, weights, options, [&](int n, const std::vector<double>& layer) {
    // v_n(j, g) = sum_i layer(i, g) e^{phi(i, j)}; sup over x in [j]
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (b + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_cap()) if (options.exec == Execution::parallel)
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
      double sum = 0.0;
      const std::size_t lo = static_cast<std::size_t>(blk) * kBlock, hi = std::min(b, lo + kBlock);
      for (std::size_t g = lo; g < hi; ++g) {
        double top = 0.0;
        for (int j = 0; j < s; ++j) {
          double v = 0.0;
          for (int i = 0; i < s; ++i) v += layer[i * b + g] * weights[i * s + j];
          top = std::max(top, v);
        }
        sum += top * top;
      }
      partial[blk] = sum;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    out.emplace_back(n, total > 0.0 ? 0.5 * std::log(total) / n + c : kMinusInfinity);
  });
  return out;
}

EtaDiagnostic eta_series_diagnostic(const SkewSystem& sys, const BasePoint& o, int cylinder,
                                    const GroupElement& g, double t, int truncation,
                                    double rho_estimate, const DpOptions& options) {
  if (truncation < 2) throw ContractError("truncation must be >= 2");
  o.validate(sys.shift());
  if (cylinder < 0 || cylinder >= sys.shift().size()) throw ContractError("cylinder out of range");
  if (!sys.group().contains(g)) throw ContractError("g is not an element of " + sys.group().name());
  if (!(t > std::exp(rho_estimate))) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "t = " << t << " is not above e^rho = " << std::exp(rho_estimate)
        << "; the series diverges";
    throw ConvergenceError(msg.str(), t / std::exp(rho_estimate));
  }
  const double c = detail::scaling_constant(sys);
  const auto weights = detail::scaled_weights(sys, c);
  auto ball = ball_for(sys, truncation, options, "eta series");
  const int s = sys.shift().size();
  const int o1 = o.first();
  const auto gi = ball.index_of(g);
  const std::size_t b = ball.size();
  const double factor = std::exp(c) / t;

  std::vector<double> terms(truncation + 1, 0.0), identity_terms(truncation + 1, 0.0);
  forward_from_cylinder(sys, cylinder, truncation, ball, weights, options, [&](int n, const std::vector<double>& layer) {
    double v = 0.0, e = 0.0;
    for (int i = 0; i < s; ++i) {
      double w = weights[i * s + o1];
      if (gi >= 0) v += layer[i * b + gi] * w;
      e += layer[i * b] * w;
    }
    terms[n] = v * std::pow(factor, n);
    identity_terms[n] = e * std::pow(factor, n);
  });

  EtaDiagnostic out;
  for (int n = 1; n <= truncation; ++n) {
    out.value += terms[n];
    out.identity_value += identity_terms[n];
  }
  out.ratio_to_identity = out.identity_value > 0.0 ? out.value / out.identity_value
                                                   : std::numeric_limits<double>::quiet_NaN();
  std::vector<int> nonzero;
  for (int n = 1; n <= truncation; ++n)
    if (terms[n] > 0.0) nonzero.push_back(n);
  if (nonzero.empty()) {
    out.reachable = false;
    out.warning = "g is not reached from the identity within " + std::to_string(truncation) + " steps";
    return out;
  }
  if (nonzero.size() < 2) {
    out.warning = "only one nonzero term; no remainder estimate";
    out.remainder = std::numeric_limits<double>::infinity();
    return out;
  }
  int n2 = nonzero.back(), n1 = nonzero[nonzero.size() - 2];
  out.term_ratio = std::pow(terms[n2] / terms[n1], 1.0 / (n2 - n1));
  if (!(out.term_ratio < 1.0))
    throw ConvergenceError("series terms are not decaying (ratio " + std::to_string(out.term_ratio) + ")",
                           out.term_ratio);
  out.remainder = terms[n2] * out.term_ratio / (1.0 - out.term_ratio);
  return out;
}

}  // namespace gurevic
