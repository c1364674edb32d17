#include "gurevic/xi.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gurevic/error.hpp"

namespace gurevic {

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> axpy(const std::vector<double>& x, double a, const std::vector<double>& y) {
  std::vector<double> out(x);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] += a * y[k];
  return out;
}

struct Minimum {
  std::vector<double> w;
  int iterations = 0;
};

Minimum newton(const PressureFunction& p, std::vector<double> w, double tol) {
  const std::size_t d = w.size();
  const int cap = 200;
  // Newton near the minimum at least halves |g| per step; when it stops doing
  // so close to tol, the gradient sits at the noise floor of the stationary
  // vector and will not go lower
  double previous = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < cap; ++it) {
    auto g = p.gradient(w);
    if (norm(g) <= tol) return {w, it};
    stalled = norm(g) > 0.5 * previous ? stalled + 1 : 0;
    previous = norm(g);
    if (stalled >= 3 && norm(g) <= 1e2 * tol) return {w, it};
    auto h = hessian(p, w);
    Eigen::MatrixXd hm(d, d);
    Eigen::VectorXd gv(d);
    for (std::size_t i = 0; i < d; ++i) {
      gv(i) = g[i];
      for (std::size_t j = 0; j < d; ++j) hm(i, j) = h[i][j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
    std::vector<double> dir(d);
    bool newton_ok = es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
    if (newton_ok) {
      Eigen::VectorXd s = -es.eigenvectors() *
                          (es.eigenvalues().cwiseInverse().asDiagonal() *
                           (es.eigenvectors().transpose() * gv));
      for (std::size_t i = 0; i < d; ++i) dir[i] = s(i);
    } else {
      for (std::size_t i = 0; i < d; ++i) dir[i] = -g[i];
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < d; ++i) slope += g[i] * dir[i];
    const double f0 = p.value(w);
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      auto trial = axpy(w, alpha, dir);
      double f1 = p.value(trial);
      if (f1 <= f0 + 1e-4 * alpha * slope || (f1 <= f0 && norm(p.gradient(trial)) < norm(g))) {
        w = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // a full Newton step that only misses the Armijo test through rounding
      auto trial = axpy(w, 1.0, dir);
      if (norm(p.gradient(trial)) < norm(g)) {
        w = std::move(trial);
      } else {
        throw ConvergenceError("line search stalled at gradient norm " + std::to_string(norm(g)),
                               norm(g));
      }
    }
  }
  double achieved = norm(p.gradient(w));
  if (achieved <= tol) return {w, cap};
  throw ConvergenceError("Newton iteration cap reached", achieved);
}

}  // namespace

PressureFunction::PressureFunction(ShiftSystem shift, Potential potential, LatticeValues f, double tol)
    : shift_(std::move(shift)), potential_(std::move(potential)), f_(std::move(f)), tol_(tol) {
  if (f_.empty()) f_ = no_displacement(shift_.size());
  if (static_cast<int>(f_.size()) != shift_.size())
    throw ContractError("displacement table does not match the shift");
  dimension_ = static_cast<int>(f_.front().size());
}

PressureFunction::PressureFunction(const SkewSystem& sys, double tol)
    : PressureFunction(sys.shift(), sys.potential(), sys.displacement(), tol) {}

double PressureFunction::value(const std::vector<double>& w) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(w); it != cache_.end()) return it->second;
  }
  double v = pressure(shift_, potential_, f_, w, tol_);
  std::lock_guard lock(cache_mutex_);
  if (cache_.size() > 4096) cache_.clear();
  cache_.emplace(w, v);
  return v;
}

std::vector<double> PressureFunction::gradient(const std::vector<double>& w) const {
  std::vector<double> g(dimension_, 0.0);
  if (dimension_ == 0) return g;
  std::vector<double> p;
  if (auto logs = bernoulli_log_weights(shift_, potential_, f_, w)) {
    const double top = *std::max_element(logs->begin(), logs->end());
    double sum = 0.0;
    for (double v : *logs) {
      p.push_back(std::exp(v - top));
      sum += p.back();
    }
    for (double& v : p) v /= sum;
  } else {
    p = gibbs(shift_, potential_, f_, w, tol_).stationary;
  }
  for (int i = 0; i < shift_.size(); ++i)
    for (int k = 0; k < dimension_; ++k) g[k] += p[i] * static_cast<double>(f_[i][k]);
  return g;
}

double p_eval(const PressureFunction& p, const std::vector<double>& w) { return p.value(w); }
std::vector<double> p_grad(const PressureFunction& p, const std::vector<double>& w) {
  return p.gradient(w);
}

std::vector<std::vector<double>> hessian(const PressureFunction& p, const std::vector<double>& w,
                                         double h) {
  const std::size_t d = w.size();
  std::vector<std::vector<double>> out(d, std::vector<double>(d, 0.0));
  auto central = [&](std::size_t k, double step) {
    auto plus = w, minus = w;
    plus[k] += step;
    minus[k] -= step;
    auto gp = p.gradient(plus), gm = p.gradient(minus);
    std::vector<double> col(d);
    for (std::size_t i = 0; i < d; ++i) col[i] = (gp[i] - gm[i]) / (2.0 * step);
    return col;
  };
  for (std::size_t k = 0; k < d; ++k) {
    auto coarse = central(k, h), fine = central(k, h / 2);
    for (std::size_t i = 0; i < d; ++i) out[i][k] = (4.0 * fine[i] - coarse[i]) / 3.0;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) out[i][j] = out[j][i] = 0.5 * (out[i][j] + out[j][i]);
  return out;
}

XiResult find_xi(const PressureFunction& p, const std::vector<double>& init, double tol,
                 std::uint64_t seed) {
  const int d = p.dimension();
  XiResult out;
  if (d == 0) {
    out.pressure_at_xi = p.value({});
    return out;
  }
  std::vector<double> start = init.empty() ? std::vector<double>(d, 0.0) : init;
  if (static_cast<int>(start.size()) != d) throw ContractError("initial point dimension mismatch");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 0.5);
  std::vector<std::vector<double>> starts{start};
  for (int k = 0; k < 2; ++k) {
    auto s = start;
    for (auto& x : s) x += jitter(rng);
    starts.push_back(s);
  }
  // the gradient is an average of f, so its rounding noise scales with |f|
  double scale = 1.0;
  for (const auto& v : p.displacement())
    for (auto x : v) scale = std::max(scale, std::abs(static_cast<double>(x)));
  std::vector<Minimum> found;
  for (const auto& s : starts) found.push_back(newton(p, s, tol * scale));

  out.xi = found.front().w;
  out.iterations = found.front().iterations;
  for (const auto& m : found) {
    std::vector<double> diff(d);
    for (int k = 0; k < d; ++k) diff[k] = m.w[k] - out.xi[k];
    out.start_spread = std::max(out.start_spread, norm(diff));
  }
  out.starts_agree = out.start_spread <= 10.0 * tol * std::max(1.0, norm(out.xi)) || out.start_spread <= 1e-8;
  out.gradient_norm = norm(p.gradient(out.xi));
  out.pressure_at_xi = p.value(out.xi);

  auto h = hessian(p, out.xi);
  Eigen::MatrixXd hm(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) hm(i, j) = h[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
  for (int i = 0; i < d; ++i) out.hessian_spectrum.push_back(es.eigenvalues()(i));
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  // the absolute floor catches minimizers escaping to infinity, where the
  // gradient and the Hessian both decay
  if (!(es.eigenvalues()(0) >= std::max(1e-8 * top, 1e-8))) {
    std::ostringstream msg;
    msg << "flat direction at the minimizer: Hessian eigenvalue " << es.eigenvalues()(0)
        << " along (";
    for (int i = 0; i < d; ++i) msg << (i ? ", " : "") << es.eigenvectors()(i, 0);
    msg << ")";
    throw ConvergenceError(msg.str(), es.eigenvalues()(0));
  }
  return out;
}

AssumptionReport check_assumptions(const SkewSystem& sys, int horizon, std::optional<double> delta,
                                   double tol, std::uint64_t seed) {
  AssumptionReport out;
  if (!sys.shift().mixing()) {
    out.mixing = {MixingStatus::failed, "base shift is not mixing (period " +
                                            std::to_string(sys.shift().period()) + ")"};
  } else {
    try {
      auto m = check_extension_mixing(sys, horizon);
      out.mixing = {m.status, m.evidence};
    } catch (const BudgetError& e) {
      out.mixing = {MixingStatus::assumed, std::string("reachability check over budget: ") + e.what()};
    }
  }

  out.delta = delta.value_or(std::numeric_limits<double>::infinity());
  if (!delta) {
    out.summability = {MixingStatus::verified, "finite shift: every twist is summable, delta = inf"};
  } else if (*delta > 0.0) {
    std::ostringstream ev;
    ev.precision(12);
    ev << "closed-form delta = " << *delta;
    out.summability = {MixingStatus::verified, ev.str()};
  } else {
    out.summability = {MixingStatus::failed, "delta is not positive"};
  }

  if (sys.rank() == 0) {
    out.minimum = {MixingStatus::verified, "d = 0: xi is the empty vector"};
    PressureFunction p(sys);
    out.xi = find_xi(p, {}, tol, seed);
    return out;
  }
  if (!sys.shift().transitive()) {
    out.minimum = {MixingStatus::failed, "base shift is not transitive"};
    return out;
  }
  try {
    PressureFunction p(sys);
    auto xi = find_xi(p, {}, tol, seed);
    double r = norm(xi.xi);
    std::ostringstream ev;
    ev.precision(12);
    ev << "|grad p(xi)| = " << xi.gradient_norm << ", min Hessian eigenvalue "
       << xi.hessian_spectrum.front() << ", |xi| = " << r;
    if (r < out.delta && xi.hessian_spectrum.front() > 0.0)
      out.minimum = {MixingStatus::verified, ev.str()};
    else
      out.minimum = {MixingStatus::failed, ev.str() + " (not interior to B(delta))"};
    out.xi = std::move(xi);
  } catch (const ConvergenceError& e) {
    out.minimum = {MixingStatus::failed, e.what()};
  }
  return out;
}

}  // namespace gurevic
