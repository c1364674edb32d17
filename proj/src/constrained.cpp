#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "gurevic/error.hpp"
#include "gurevic/indexed_ball.hpp"
#include "gurevic/skewprod.hpp"
#include "skew_internal.hpp"

namespace gurevic {

double ConstrainedValue::value() const { return std::exp(log_value); }

namespace detail {

double scaling_constant(const SkewSystem& sys) {
  const auto& shift = sys.shift();
  if (shift.transitive()) return pressure(shift, sys.potential());
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < shift.size(); ++i)
    for (int j : shift.successors(i)) top = std::max(top, sys.potential()(i, j));
  return top;
}

std::vector<double> scaled_weights(const SkewSystem& sys, double c) {
  const int s = sys.shift().size();
  std::vector<double> w(static_cast<std::size_t>(s) * s, 0.0);
  for (int i = 0; i < s; ++i)
    for (int j : sys.shift().successors(i)) w[i * s + j] = std::exp(sys.potential()(i, j) - c);
  return w;
}

GroupElement target_of(const SkewSystem& sys, const ConstraintMode& mode) {
  return mode.target ? *mode.target : sys.group().identity();
}


std::vector<RunSpec> runs_for(const SkewSystem& sys, const ConstraintMode& mode) {
  std::vector<RunSpec> runs;
  const int s = sys.shift().size();
  switch (mode.kind) {
    case ConstraintMode::Kind::periodic_all:
      for (int a = 0; a < s; ++a) runs.push_back({{a}, a, true});
      break;
    case ConstraintMode::Kind::periodic_cylinder:
      runs.push_back({{*mode.cylinder}, *mode.cylinder, true});
      break;
    case ConstraintMode::Kind::preimage: {
      RunSpec r{{}, mode.base_point->first(), false};
      for (int a = 0; a < s; ++a) r.starts.push_back(a);
      runs.push_back(r);
      break;
    }
    case ConstraintMode::Kind::preimage_cylinder:
      runs.push_back({{*mode.cylinder}, mode.base_point->first(), false});
      break;
  }
  return runs;
}

}  // namespace detail

namespace {

constexpr const char* kFasterPaths = " (try the Fourier path for Z^d or the radial path for free groups)";

// Ball construction fails first on big radii; keep the hint in the message.
IndexedBall hinted_ball(const Group& group, int radius, std::size_t budget, const std::string& what) {
  try {
    return IndexedBall(group, radius, budget);
  } catch (const BudgetError& e) {
    throw BudgetError(what + kFasterPaths, e.requested(), e.budget());
  }
}

using detail::scaled_weights;
using detail::scaling_constant;
using detail::target_of;

struct Totals {
  double mass = 0.0;
  double acc = 0.0;
};

ConstrainedAverage finish(const Totals& t, int n, double c, int radius, std::size_t ball_size,
                          std::string method) {
  ConstrainedAverage out;
  out.sum.n = n;
  out.sum.radius = radius;
  out.sum.ball_size = ball_size;
  out.sum.method = std::move(method);
  if (t.mass > 0.0) {
    out.sum.log_value = std::log(t.mass) + n * c;
    out.average = t.acc / (n * t.mass);
  } else {
    out.average = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

// Dense DP on an indexed ball of radius ceil((nL + |t|)/2).
ConstrainedAverage dense_dp(const SkewSystem& sys, int n, const ConstraintMode& mode,
                            const Potential* g, const DpOptions& options) {
  const auto& shift = sys.shift();
  const auto& group = sys.group();
  const int s = shift.size();
  const int step_length = sys.cocycle().max_step_length();
  const GroupElement target = target_of(sys, mode);
  const int target_length = word_length(group, target, n * step_length);
  const double c = scaling_constant(sys);
  if (target_length < 0) return finish({}, n, c, 0, 0, "dense-dp");

  const int radius = (n * step_length + target_length + 1) / 2;
  const std::size_t layers = g ? 4 : 2;
  IndexedBall ball = hinted_ball(group, radius, options.budget, "dense constrained DP at n = " + std::to_string(n));
  const std::size_t entries = static_cast<std::size_t>(s) * ball.size() * (layers + 1);
  if (entries > options.budget)
    throw BudgetError("dense constrained DP at n = " + std::to_string(n) +
                          kFasterPaths,
                      entries, options.budget);

  BallStep step;
  step.states = s;
  step.size = ball.size();
  step.weight = scaled_weights(sys, c);
  step.lengths = &ball.lengths();
  for (int j = 0; j < s; ++j)
    step.pull.push_back(ball.right_multiplication(inverse(sys.cocycle().values[j])));
  std::vector<double> gvals;
  if (g) gvals.assign(g->edge_values().begin(), g->edge_values().end());

  const std::int32_t t_index = ball.index_of(target);
  const std::size_t layer = static_cast<std::size_t>(s) * ball.size();
  std::vector<double> mass(layer), next_mass(layer), acc, next_acc;
  if (g) {
    acc.resize(layer);
    next_acc.resize(layer);
  }
  auto keep = [&](int k) { return std::min(radius, target_length + (n - k) * step_length); };

  Totals totals;
  for (const auto& run : detail::runs_for(sys, mode)) {
    std::fill(mass.begin(), mass.end(), 0.0);
    if (g) std::fill(acc.begin(), acc.end(), 0.0);
    for (int a : run.starts) {
      auto idx = ball.index_of(sys.cocycle().values[a]);
      if (idx >= 0 && ball.length(idx) <= keep(1)) mass[a * ball.size() + idx] = 1.0;
    }
    for (int k = 2; k <= n; ++k) {
      if (g) {
        ball_step_accumulate(step, gvals, mass, acc, next_mass, next_acc, keep(k), options.exec);
        std::swap(acc, next_acc);
      } else {
        ball_step(step, mass, next_mass, keep(k), options.exec);
      }
      std::swap(mass, next_mass);
    }
    if (t_index < 0) continue;
    const int close = run.close_to;
    for (int i = 0; i < s; ++i) {
      if (!shift.allowed(i, close)) continue;
      double m = mass[i * ball.size() + t_index];
      if (m == 0.0) continue;
      double w = std::exp(sys.potential()(i, close) - c);
      totals.mass += w * m;
      if (g) totals.acc += w * (acc[i * ball.size() + t_index] + (*g)(i, close) * m);
    }
  }
  return finish(totals, n, c, radius, ball.size(), "dense-dp");
}

// Hash-keyed sparse DP; the independent reference for the dense kernels.
ConstrainedAverage hash_dp(const SkewSystem& sys, int n, const ConstraintMode& mode,
                           const Potential* g) {
  const auto& shift = sys.shift();
  const auto& group = sys.group();
  const int s = shift.size();
  const int step_length = sys.cocycle().max_step_length();
  const GroupElement target = target_of(sys, mode);
  const double c = scaling_constant(sys);
  const auto weights = scaled_weights(sys, c);
  using Layer = std::vector<std::unordered_map<GroupElement, std::pair<double, double>>>;

  auto can_return = [&](const GroupElement& h, int remaining) {
    return group.word_length_lower_bound(multiply(inverse(h), target)) <= remaining * step_length;
  };

  Totals totals;
  std::size_t widest = 0;
  for (const auto& run : detail::runs_for(sys, mode)) {
    Layer cur(s);
    for (int a : run.starts)
      if (can_return(sys.cocycle().values[a], n - 1)) cur[a][sys.cocycle().values[a]].first += 1.0;
    for (int k = 2; k <= n; ++k) {
      Layer next(s);
      for (int i = 0; i < s; ++i)
        for (const auto& [h, v] : cur[i])
          for (int j : shift.successors(i)) {
            GroupElement moved = multiply(h, sys.cocycle().values[j]);
            if (!can_return(moved, n - k)) continue;
            double w = weights[i * s + j];
            auto& slot = next[j][moved];
            slot.first += w * v.first;
            if (g) slot.second += w * (v.second + (*g)(i, j) * v.first);
          }
      cur = std::move(next);
      std::size_t width = 0;
      for (const auto& m : cur) width += m.size();
      widest = std::max(widest, width);
    }
    for (int i = 0; i < s; ++i) {
      if (!shift.allowed(i, run.close_to)) continue;
      auto it = cur[i].find(target);
      if (it == cur[i].end()) continue;
      double w = std::exp(sys.potential()(i, run.close_to) - c);
      totals.mass += w * it->second.first;
      if (g) totals.acc += w * (it->second.second + (*g)(i, run.close_to) * it->second.first);
    }
  }
  return finish(totals, n, c, 0, widest, "hash-dp");
}

ConstrainedAverage dispatch(const SkewSystem& sys, int n, const ConstraintMode& mode,
                            const Potential* g, const DpOptions& options) {
  if (n < 1) throw ContractError("n must be >= 1");
  mode.validate(sys);
  if (g && g->states() != sys.shift().size())
    throw ContractError("test function is defined on a different number of states");
  if (options.method == DpMethod::hash) return hash_dp(sys, n, mode, g);
  return dense_dp(sys, n, mode, g, options);
}

}  // namespace

ConstrainedValue constrained_sum(const SkewSystem& sys, int n, const ConstraintMode& mode,
                                 const DpOptions& options) {
  return dispatch(sys, n, mode, nullptr, options).sum;
}

ConstrainedAverage constrained_average(const SkewSystem& sys, int n, const ConstraintMode& mode,
                                       const Potential& g, const DpOptions& options) {
  auto out = dispatch(sys, n, mode, &g, options);
  if (std::isnan(out.average)) return out;
  // a weighted mean of g: clamping only removes rounding, and makes g = const
  // come out exactly
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const auto& shift = sys.shift();
  for (int i = 0; i < shift.size(); ++i)
    for (int j : shift.successors(i)) {
      lo = std::min(lo, g(i, j));
      hi = std::max(hi, g(i, j));
    }
  out.average = std::clamp(out.average, lo, hi);
  return out;
}

std::vector<ConstrainedValue> constrained_sequence(const SkewSystem& sys, int n_max,
                                                   const ConstraintMode& mode,
                                                   const DpOptions& options) {
  if (n_max < 1) throw ContractError("n_max must be >= 1");
  if (!mode.periodic()) throw ContractError("sequence evaluation needs a periodic mode");
  mode.validate(sys);
  const auto& shift = sys.shift();
  const auto& group = sys.group();
  const GroupElement target = target_of(sys, mode);
  const bool abelian = group.kind() == GroupKind::lattice || group.kind() == GroupKind::cyclic;
  if (!is_identity(target) && !abelian)
    throw ContractError("sequence evaluation with a non-identity target needs an abelian group");

  const int s = shift.size();
  const int step_length = sys.cocycle().max_step_length();
  const int half = (n_max + 1) / 2;
  const int radius = half * step_length;
  const double c = scaling_constant(sys);
  IndexedBall ball =
      hinted_ball(group, radius, options.budget, "meet-in-the-middle DP to n = " + std::to_string(n_max));
  const std::size_t layer = static_cast<std::size_t>(s) * ball.size();
  const std::size_t entries = layer * (3 * static_cast<std::size_t>(s) + 1);
  if (entries > options.budget)
    throw BudgetError("meet-in-the-middle DP to n = " + std::to_string(n_max) +
                          kFasterPaths,
                      entries, options.budget);

  BallStep step;
  step.states = s;
  step.size = ball.size();
  step.weight = scaled_weights(sys, c);
  step.lengths = &ball.lengths();
  for (int j = 0; j < s; ++j)
    step.pull.push_back(ball.right_multiplication(inverse(sys.cocycle().values[j])));

  // partner[g] = index of g^{-1} t
  std::vector<std::int32_t> partner = ball.inverses();
  if (!is_identity(target)) {
    for (std::size_t k = 0; k < ball.size(); ++k)
      partner[k] = ball.index_of(multiply(inverse(ball.element(k)), target));
  }

  // F[a] holds paths started at (a, e), laid out [state][element]
  std::vector<std::vector<double>> prev(s, std::vector<double>(layer, 0.0)), cur = prev;
  for (int a = 0; a < s; ++a) prev[a][a * ball.size()] = 1.0;  // identity has index 0

  std::vector<int> starts;
  if (mode.kind == ConstraintMode::Kind::periodic_cylinder)
    starts = {*mode.cylinder};
  else
    for (int a = 0; a < s; ++a) starts.push_back(a);

  auto pair_sum = [&](const std::vector<std::vector<double>>& first,
                      const std::vector<std::vector<double>>& second) {
    double total = 0.0;
    for (int a : starts)
      for (int j = 0; j < s; ++j) {
        std::span<const double> lhs(&first[a][j * ball.size()], ball.size());
        std::span<const double> rhs(&second[j][a * ball.size()], ball.size());
        total += gather_dot(lhs, rhs, partner, options.exec);
      }
    return total;
  };

  std::vector<ConstrainedValue> out;
  auto record = [&](int n, double scaled) {
    ConstrainedValue v;
    v.n = n;
    v.radius = radius;
    v.ball_size = ball.size();
    v.method = "dense-dp-mitm";
    if (scaled > 0.0) v.log_value = std::log(scaled) + n * c;
    out.push_back(v);
  };
  for (int k = 1; k <= half; ++k) {
    for (int a = 0; a < s; ++a) ball_step(step, prev[a], cur[a], radius, options.exec);
    record(2 * k - 1, pair_sum(cur, prev));
    if (2 * k <= n_max) record(2 * k, pair_sum(cur, cur));
    std::swap(prev, cur);
  }
  return out;
}

bool radial_applicable(const SkewSystem& sys) {
  const auto& group = sys.group();
  if (group.kind() != GroupKind::free) return false;
  const int k = group.parameter();
  const auto& shift = sys.shift();
  if (shift.size() != 2 * k || !shift.full_shift()) return false;
  std::vector<bool> hit(2 * k, false);
  for (const auto& v : sys.cocycle().values) {
    const auto& w = std::get<FreeWord>(v);
    if (w.letters.size() != 1) return false;
    int l = w.letters[0];
    int slot = l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1;
    if (hit[slot]) return false;
    hit[slot] = true;
  }
  return sys.potential().constant_on(shift);
}

std::vector<ConstrainedValue> free_group_radial_sequence(const SkewSystem& sys, int n_max) {
  if (!radial_applicable(sys))
    throw ContractError(
        "radial path needs a full shift on 2k states mapped onto the generators of F_k and their "
        "inverses with a constant potential; use constrained_sum");
  if (n_max < 1) throw ContractError("n_max must be >= 1");
  const int k = sys.group().parameter();
  const double degree = 2.0 * k;
  const double phi = sys.potential()(0, 0);
  // distance-from-identity chain, probabilities scaled by (2k)^{-n}
  std::vector<double> dist(n_max + 2, 0.0), next(n_max + 2, 0.0);
  dist[0] = 1.0;
  std::vector<ConstrainedValue> out;
  for (int n = 1; n <= n_max; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int r = 0; r <= n_max; ++r) {
      if (dist[r] == 0.0) continue;
      if (r == 0) {
        next[1] += dist[0];
      } else {
        next[r - 1] += dist[r] / degree;
        next[r + 1] += dist[r] * (degree - 1.0) / degree;
      }
    }
    std::swap(dist, next);
    ConstrainedValue v;
    v.n = n;
    v.radius = n;
    v.ball_size = static_cast<std::size_t>(n) + 1;
    v.method = "radial";
    if (dist[0] > 0.0) v.log_value = std::log(dist[0]) + n * (std::log(degree) + phi);
    out.push_back(v);
  }
  return out;
}

ConstrainedValue free_group_radial_sum(const SkewSystem& sys, int n) {
  return free_group_radial_sequence(sys, n).back();
}

}  // namespace gurevic
