#include "gurevic/equidist.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "gurevic/error.hpp"
#include "gurevic/oracle.hpp"
#include "gurevic/xi.hpp"
#include "skew_internal.hpp"

namespace gurevic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string empty_diagnosis(const SkewSystem& sys, int n) {
  std::string out = "constrained set is empty at n = " + std::to_string(n);
  if (!sys.shift().mixing()) return out + "; base shift has period " + std::to_string(sys.shift().period());
  try {
    auto report = sys.mixing() ? *sys.mixing() : check_extension_mixing(sys.abelianized(), 2);
    if (report.lattice_index != 1)
      out += "; cycle lattice has index " + std::to_string(report.lattice_index) +
             " (only some n are reachable)";
  } catch (const Error&) {
  }
  return out;
}

// smallest q <= 1000 with q*g integral on every allowed edge
std::optional<int> common_denominator(const ShiftSystem& shift, const Potential& g) {
  for (int q = 1; q <= 1000; ++q) {
    bool ok = true;
    for (int i = 0; i < shift.size() && ok; ++i)
      for (int j : shift.successors(i)) {
        double v = q * g(i, j);
        if (std::abs(v - std::round(v)) > 1e-9 * std::max(1.0, std::abs(v))) {
          ok = false;
          break;
        }
      }
    if (ok) return q;
  }
  return std::nullopt;
}

struct LevelKey {
  GroupElement h;
  std::int64_t level;
  bool operator==(const LevelKey&) const = default;
};

struct LevelHash {
  std::size_t operator()(const LevelKey& k) const noexcept {
    return hash_value(k.h) ^ (std::hash<std::int64_t>{}(k.level) * 0x9e3779b97f4a7c15ULL);
  }
};

TailRow level_dp(const SkewSystem& sys, const ConstraintMode& mode, const Potential& g, int q,
                 double limit, double epsilon, int n) {
  const auto& shift = sys.shift();
  const auto& group = sys.group();
  const int s = shift.size();
  const int step_length = sys.cocycle().max_step_length();
  const GroupElement target = detail::target_of(sys, mode);
  const double c = detail::scaling_constant(sys);
  const auto weights = detail::scaled_weights(sys, c);
  std::vector<std::int64_t> level(static_cast<std::size_t>(s) * s, 0);
  for (int i = 0; i < s; ++i)
    for (int j : shift.successors(i)) level[i * s + j] = std::llround(q * g(i, j));
  auto can_return = [&](const GroupElement& h, int remaining) {
    return group.word_length_lower_bound(multiply(inverse(h), target)) <= remaining * step_length;
  };
  using Layer = std::vector<std::unordered_map<LevelKey, double, LevelHash>>;

  double mass = 0.0, tail = 0.0;
  for (const auto& run : detail::runs_for(sys, mode)) {
    Layer cur(s);
    for (int a : run.starts)
      if (can_return(sys.cocycle().values[a], n - 1)) cur[a][{sys.cocycle().values[a], 0}] += 1.0;
    for (int k = 2; k <= n; ++k) {
      Layer next(s);
      for (int i = 0; i < s; ++i)
        for (const auto& [key, v] : cur[i])
          for (int j : shift.successors(i)) {
            GroupElement moved = multiply(key.h, sys.cocycle().values[j]);
            if (!can_return(moved, n - k)) continue;
            next[j][{std::move(moved), key.level + level[i * s + j]}] += weights[i * s + j] * v;
          }
      cur = std::move(next);
    }
    for (int i = 0; i < s; ++i) {
      if (!shift.allowed(i, run.close_to)) continue;
      const double w = weights[i * s + run.close_to];
      for (const auto& [key, v] : cur[i]) {
        if (!(key.h == target)) continue;
        const double average =
            static_cast<double>(key.level + level[i * s + run.close_to]) / (static_cast<double>(q) * n);
        mass += w * v;
        if (std::abs(average - limit) > epsilon) tail += w * v;
      }
    }
  }
  return {n, epsilon, mass > 0.0 ? tail / mass : kNaN, "level-dp"};
}

}  // namespace

EmpiricalIntegral empirical_integral(const SkewSystem& sys, const ConstraintMode& mode, int n,
                                     const Potential& g, const DpOptions& options) {
  auto r = constrained_average(sys, n, mode, g, options);
  EmpiricalIntegral out;
  out.n = n;
  out.value = r.average;
  out.log_mass = r.sum.log_value;
  out.method = r.sum.method;
  if (out.empty()) out.diagnosis = empty_diagnosis(sys, n);
  return out;
}

std::vector<double> default_xi(const SkewSystem& sys, double tol) {
  if (sys.rank() == 0) return {};
  PressureFunction p(sys);
  return find_xi(p, {}, tol).xi;
}

double gibbs_limit(const SkewSystem& sys, const Potential& g, const std::vector<double>& xi) {
  auto mu = gibbs(sys.shift(), sys.potential(), sys.displacement(), xi);
  return integrate(mu, sys.shift(), g);
}

EquidistReport equidist_report(const SkewSystem& sys, const Potential& g,
                               const std::vector<int>& n_list,
                               const std::vector<ConstraintMode>& modes, const DpOptions& options,
                               std::optional<std::vector<double>> xi) {
  EquidistReport out;
  out.xi = xi ? *xi : default_xi(sys);
  out.limit = gibbs_limit(sys, g, out.xi);
  for (const auto& mode : modes) {
    for (int n : n_list) {
      EquidistRow row;
      row.mode = mode.name();
      row.n = n;
      row.limit = out.limit;
      try {
        auto e = empirical_integral(sys, mode, n, g, options);
        row.empirical = e.value;
        row.abs_diff = std::abs(e.value - out.limit);
        row.error = e.diagnosis;
      } catch (const BudgetError& err) {
        row.empirical = row.abs_diff = kNaN;
        row.error = err.what();
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

TailRow ld_tail_mass(const SkewSystem& sys, const ConstraintMode& mode, const Potential& g,
                     double limit, double epsilon, int n, const DpOptions& options, int ceiling) {
  (void)options;
  if (!(epsilon > 0.0)) throw ContractError("epsilon must be positive");
  if (n < 1) throw ContractError("n must be >= 1");
  mode.validate(sys);
  if (auto q = common_denominator(sys.shift(), g)) return level_dp(sys, mode, g, *q, limit, epsilon, n);
  return {n, epsilon, oracle::tail_mass(sys, n, mode, g, limit, epsilon, ceiling), "brute-force"};
}

std::optional<TailFit> fit_tail(const std::vector<TailRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.tail_mass > 0.0) pts.emplace_back(r.n, std::log(r.tail_mass));
  if (pts.size() < 2) return std::nullopt;
  Eigen::MatrixXd a(pts.size(), 2);
  Eigen::VectorXd b(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    a(k, 0) = pts[k].first;
    a(k, 1) = 1.0;
    b(k) = pts[k].second;
  }
  Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
  Eigen::VectorXd res = b - a * x;
  const double mean = b.mean();
  const double total = (b.array() - mean).square().sum();
  TailFit fit;
  fit.eta = -x(0);
  fit.intercept = x(1);
  fit.r_squared = total > 0.0 ? 1.0 - res.squaredNorm() / total : 1.0;
  fit.residual = std::sqrt(res.squaredNorm() / pts.size());
  fit.points = static_cast<int>(pts.size());
  return fit;
}

LdReport ld_tail(const SkewSystem& sys, const Potential& g, double epsilon,
                 const std::vector<int>& n_list, const ConstraintMode& mode,
                 std::optional<double> limit, const DpOptions& options) {
  LdReport out;
  out.limit = limit ? *limit : gibbs_limit(sys, g, default_xi(sys));
  for (int n : n_list) out.rows.push_back(ld_tail_mass(sys, mode, g, out.limit, epsilon, n, options));
  out.fit = fit_tail(out.rows);
  return out;
}

}  // namespace gurevic
