#include "gurevic/transfer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "gurevic/error.hpp"

namespace gurevic {

namespace {

double dot(std::span<const double> w, const std::vector<std::int64_t>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * static_cast<double>(f[k]);
  return s;
}

void check_dimensions(const ShiftSystem& shift, const LatticeValues& f, std::size_t w_size,
                      std::size_t t_size) {
  if (static_cast<int>(f.size()) != shift.size())
    throw ContractError("displacement table has " + std::to_string(f.size()) + " rows for " +
                        std::to_string(shift.size()) + " states");
  const std::size_t d = f.empty() ? 0 : f.front().size();
  for (const auto& row : f)
    if (row.size() != d) throw ContractError("displacement rows differ in dimension");
  if (w_size != 0 && w_size != d)
    throw ContractError("twist w has dimension " + std::to_string(w_size) + ", expected " +
                        std::to_string(d));
  if (t_size != 0 && t_size != d)
    throw ContractError("torus point t has dimension " + std::to_string(t_size) + ", expected " +
                        std::to_string(d));
}

double relative_residual(const DenseMatrix& m, const Eigen::VectorXd& v, double lambda, bool left) {
  std::vector<double> x(v.data(), v.data() + v.size()), y(v.size());
  if (left)
    left_matvec(m, x, y, Execution::serial);
  else
    matvec(m, x, y, Execution::serial);
  double worst = 0.0, scale = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    worst = std::max(worst, std::abs(y[i] - lambda * v(i)));
    scale = std::max(scale, std::abs(v(i)));
  }
  return worst / (lambda * scale);
}

void normalize(PerronData& out) {
  out.right /= out.right.maxCoeff();
  out.left /= out.left.dot(out.right);
}

std::optional<PerronData> dense_perron(const DenseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.n);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(i, j);

  auto leading = [](const Eigen::EigenSolver<Eigen::MatrixXd>& es, Eigen::VectorXd& vec) {
    const auto& ev = es.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < ev.size(); ++k)
      if (ev(k).real() > ev(best).real()) best = k;
    vec = es.eigenvectors().col(best).real();
    if (vec.sum() < 0) vec = -vec;
    return ev(best).real();
  };

  Eigen::EigenSolver<Eigen::MatrixXd> right_solver(a, true);
  Eigen::EigenSolver<Eigen::MatrixXd> left_solver(a.transpose(), true);
  if (right_solver.info() != Eigen::Success || left_solver.info() != Eigen::Success)
    return std::nullopt;
  PerronData out;
  out.method = "dense";
  out.lambda = leading(right_solver, out.right);
  leading(left_solver, out.left);
  if (out.right.minCoeff() <= 0.0 || out.left.minCoeff() <= 0.0) return std::nullopt;

  std::vector<double> moduli;
  for (Eigen::Index k = 0; k < right_solver.eigenvalues().size(); ++k)
    moduli.push_back(std::abs(right_solver.eigenvalues()(k)));
  std::sort(moduli.rbegin(), moduli.rend());
  out.second_modulus = moduli.size() > 1 ? moduli[1] : 0.0;
  normalize(out);
  return out;
}

// M(i,j) = c_i for every j: lambda = sum c_i, r = c, l constant.
std::optional<PerronData> rank_one_perron(const DenseMatrix& m) {
  const std::size_t n = m.n;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &m.data[i * n];
    if (row[0] <= 0.0) return std::nullopt;
    for (std::size_t j = 1; j < n; ++j)
      if (row[j] != row[0]) return std::nullopt;
  }
  PerronData out;
  out.method = "rank-one";
  out.right.resize(static_cast<Eigen::Index>(n));
  out.left = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  out.lambda = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.right(static_cast<Eigen::Index>(i)) = m.data[i * n];
    out.lambda += m.data[i * n];
  }
  out.second_modulus = 0.0;
  normalize(out);
  return out;
}

// Power iteration on M + cI; c > 0 breaks the rotation of periodic spectra.
PerronData power_perron(const DenseMatrix& m, bool periodic, double tol, bool left, Execution exec) {
  const std::size_t n = m.n;
  double c = 0.0;
  if (periodic) {
    for (double v : m.data) c = std::max(c, v);
  }
  std::vector<double> x(n, 1.0), y(n);
  const int cap = 200000;
  double lo = 0.0, hi = 0.0;
  int it = 0;
  for (; it < cap; ++it) {
    if (left)
      left_matvec(m, x, y, exec);
    else
      matvec(m, x, y, exec);
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += c * x[i];
      double ratio = y[i] / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      top = std::max(top, y[i]);
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / top;
    if (hi - lo <= 0.25 * tol * lo) break;
  }
  PerronData out;
  out.method = "power";
  out.iterations = it + 1;
  out.lambda = 0.5 * (lo + hi) - c;
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
  (left ? out.left : out.right) = v;
  if (it == cap)
    throw ConvergenceError("power iteration did not converge within " + std::to_string(cap) +
                               " iterations",
                           (hi - lo) / lo);
  return out;
}

}  // namespace

LatticeValues no_displacement(int states) { return LatticeValues(states); }

TransferMatrix build_operator(const ShiftSystem& shift, const Potential& potential,
                              const LatticeValues& f, std::span<const double> w,
                              std::span<const double> t) {
  const LatticeValues& fv = f.empty() ? no_displacement(shift.size()) : f;
  check_dimensions(shift, fv, w.size(), t.size());
  const int s = shift.size();
  TransferMatrix out{Eigen::MatrixXcd::Zero(s, s), {w.begin(), w.end()}, {t.begin(), t.end()}};
  for (int i = 0; i < s; ++i) {
    double real = dot(w, fv[i]);
    double phase = 2.0 * std::numbers::pi * dot(t, fv[i]);
    for (int j = 0; j < s; ++j)
      if (shift.allowed(i, j))
        out.entries(i, j) = std::polar(std::exp(potential(i, j) + real), phase);
  }
  return out;
}

ScaledMatrix real_operator(const ShiftSystem& shift, const Potential& potential,
                           const LatticeValues& f, std::span<const double> w) {
  const LatticeValues& fv = f.empty() ? no_displacement(shift.size()) : f;
  check_dimensions(shift, fv, w.size(), 0);
  const auto s = static_cast<std::size_t>(shift.size());
  ScaledMatrix out;
  out.matrix.n = s;
  out.matrix.data.assign(s * s, 0.0);
  out.offset = -std::numeric_limits<double>::infinity();
  std::vector<double> twist(s);
  for (std::size_t i = 0; i < s; ++i) twist[i] = dot(w, fv[i]);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      if (shift.allowed(static_cast<int>(i), static_cast<int>(j)))
        out.offset = std::max(out.offset, potential(static_cast<int>(i), static_cast<int>(j)) + twist[i]);
  for (std::size_t i = 0; i < s; ++i) {
    const int row = static_cast<int>(i);
    // depth-1 rows share one exponential
    const double shared = potential.depth() == 1 ? std::exp(potential(row, 0) + twist[i] - out.offset) : 0.0;
    for (std::size_t j = 0; j < s; ++j)
      if (shift.allowed(row, static_cast<int>(j)))
        out.matrix(i, j) = potential.depth() == 1
                               ? shared
                               : std::exp(potential(row, static_cast<int>(j)) + twist[i] - out.offset);
  }
  return out;
}

PerronData perron(const ShiftSystem& shift, const DenseMatrix& m, double tol, PerronMethod method,
                  Execution exec) {
  if (!shift.transitive()) throw ContractError("Perron data needs a transitive (irreducible) shift");
  if (m.n != static_cast<std::size_t>(shift.size()))
    throw ContractError("matrix size does not match the shift");
  if (method == PerronMethod::automatic)
    method = m.n <= 64 ? PerronMethod::dense : PerronMethod::power;

  PerronData out;
  bool done = false;
  if (auto r = rank_one_perron(m)) {
    out = std::move(*r);
    done = true;
  } else if (method == PerronMethod::dense) {
    if (auto d = dense_perron(m)) {
      out = std::move(*d);
      done = true;
    }
  }
  if (!done) {
    const bool periodic = shift.period() > 1;
    out = power_perron(m, periodic, tol, false, exec);
    auto l = power_perron(m, periodic, tol, true, exec);
    out.left = l.left;
    out.iterations += l.iterations;
    normalize(out);
  }
  out.residual = std::max(relative_residual(m, out.right, out.lambda, false),
                          relative_residual(m, out.left, out.lambda, true));
  if (!(out.residual <= tol))
    throw ConvergenceError("Perron residual above tolerance " + std::to_string(tol), out.residual);
  return out;
}

std::optional<std::vector<double>> bernoulli_log_weights(const ShiftSystem& shift,
                                                         const Potential& potential,
                                                         const LatticeValues& f,
                                                         std::span<const double> w) {
  if (!shift.full_shift() || potential.depth() != 1) return std::nullopt;
  const LatticeValues& fv = f.empty() ? no_displacement(shift.size()) : f;
  check_dimensions(shift, fv, w.size(), 0);
  std::vector<double> out(shift.size());
  for (int i = 0; i < shift.size(); ++i) out[i] = potential.state_value(i) + dot(w, fv[i]);
  return out;
}

double pressure(const ShiftSystem& shift, const Potential& potential, const LatticeValues& f,
                std::span<const double> w, double tol) {
  if (auto logs = bernoulli_log_weights(shift, potential, f, w)) {
    const double top = *std::max_element(logs->begin(), logs->end());
    double sum = 0.0;
    for (double v : *logs) sum += std::exp(v - top);
    return top + std::log(sum);
  }
  auto scaled = real_operator(shift, potential, f, w);
  auto data = perron(shift, scaled.matrix, tol);
  return std::log(data.lambda) + scaled.offset;
}

std::vector<std::pair<int, double>> pressure_via_periodic(const ShiftSystem& shift,
                                                          const Potential& potential, int n_max) {
  if (n_max < 1) throw ContractError("n_max must be >= 1");
  auto scaled = real_operator(shift, potential);
  const auto s = static_cast<Eigen::Index>(scaled.matrix.n);
  Eigen::MatrixXd m(s, s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j) m(i, j) = scaled.matrix(i, j);
  Eigen::MatrixXd p = m;
  double log_scale = 0.0;
  std::vector<std::pair<int, double>> out;
  for (int n = 1; n <= n_max; ++n) {
    double tr = p.trace();
    double value = tr > 0.0 ? (std::log(tr) + log_scale) / n + scaled.offset : kMinusInfinity;
    out.emplace_back(n, value);
    if (n == n_max) break;
    p = (p * m).eval();
    double top = p.maxCoeff();
    if (!(top > 0.0) || !std::isfinite(top))
      throw ConvergenceError("matrix power degenerate at n = " + std::to_string(n + 1), n + 1);
    p /= top;
    log_scale += std::log(top);
  }
  return out;
}

std::vector<std::complex<double>> trace_powers(const TransferMatrix& m, int n_max) {
  std::vector<std::complex<double>> out;
  Eigen::MatrixXcd p = m.entries;
  for (int n = 1; n <= n_max; ++n) {
    out.push_back(p.trace());
    if (n < n_max) p = (p * m.entries).eval();
  }
  return out;
}

GibbsMeasure gibbs(const ShiftSystem& shift, const Potential& potential, const LatticeValues& f,
                   std::span<const double> w, double tol) {
  auto scaled = real_operator(shift, potential, f, w);
  GibbsMeasure g;
  g.perron = perron(shift, scaled.matrix, tol);
  g.offset = scaled.offset;
  g.pressure = std::log(g.perron.lambda) + scaled.offset;
  const std::size_t s = scaled.matrix.n;
  g.stationary.resize(s);
  for (std::size_t i = 0; i < s; ++i)
    g.stationary[i] = g.perron.left(static_cast<Eigen::Index>(i)) *
                      g.perron.right(static_cast<Eigen::Index>(i));
  g.kernel.n = s;
  g.kernel.data.assign(s * s, 0.0);
  const auto& r = g.perron.right;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      g.kernel(i, j) = scaled.matrix(i, j) * r(static_cast<Eigen::Index>(j)) /
                       (g.perron.lambda * r(static_cast<Eigen::Index>(i)));
  return g;
}

CylinderMass cylinder_mass(const GibbsMeasure& g, const ShiftSystem& shift, std::span<const int> word) {
  if (word.empty()) return {1.0, true};
  if (!shift.allows(word)) return {0.0, false};
  double mass = g.stationary[word[0]];
  for (std::size_t t = 0; t + 1 < word.size(); ++t) mass *= g.kernel(word[t], word[t + 1]);
  return {mass, true};
}

double integrate(const GibbsMeasure& g, const ShiftSystem& shift, const Potential& function) {
  double s = 0.0;
  for (int i = 0; i < shift.size(); ++i)
    for (int j : shift.successors(i)) s += g.stationary[i] * g.kernel(i, j) * function(i, j);
  return s;
}

GibbsBounds gibbs_bounds_check(const GibbsMeasure& g, const ShiftSystem& shift,
                               const Potential& potential, int up_to, int ceiling) {
  const double lambda = g.perron.lambda;
  const auto& l = g.perron.left;
  const auto& r = g.perron.right;
  GibbsBounds out;
  out.envelope_low = std::numeric_limits<double>::infinity();
  out.envelope_high = 0.0;
  for (int i = 0; i < shift.size(); ++i)
    for (int j = 0; j < shift.size(); ++j)
      for (int k : shift.successors(j)) {
        double v = l(i) * r(j) * lambda * std::exp(g.offset - potential(j, k));
        out.envelope_low = std::min(out.envelope_low, v);
        out.envelope_high = std::max(out.envelope_high, v);
      }

  out.a_emp = std::numeric_limits<double>::infinity();
  out.b_emp = 0.0;
  // continuation symbol after w_n, by (w_n, w_1)
  std::vector<int> next(static_cast<std::size_t>(shift.size()) * shift.size(), -1);
  for (int a = 0; a < shift.size(); ++a)
    for (int b = 0; b < shift.size(); ++b) {
      if (shift.allowed(a, b))
        next[a * shift.size() + b] = b;
      else if (auto path = shift.shortest_path(a, b))
        next[a * shift.size() + b] = path->front();
    }
  Word w;
  for (int n = 1; n <= up_to; ++n) {
    auto stream = WordStream::all(shift, n, std::nullopt, ceiling);
    while (stream.next(w)) {
      int c = next[w.back() * shift.size() + w.front()];
      if (c < 0) continue;  // no return to w_1; not in a transitive component
      // mass * e^{nP - phi^n}, one factor per symbol so the Bernoulli case stays exact
      double ratio = g.stationary[w[0]];
      for (int t = 0; t + 1 < n; ++t)
        ratio *= g.kernel(w[t], w[t + 1]) * lambda * std::exp(g.offset - potential(w[t], w[t + 1]));
      ratio *= lambda * std::exp(g.offset - potential(w.back(), c));
      out.a_emp = std::min(out.a_emp, ratio);
      out.b_emp = std::max(out.b_emp, ratio);
      ++out.words;
    }
  }
  return out;
}

double twisted_spectral_radius(const ShiftSystem& shift, const Potential& potential,
                               const LatticeValues& f, std::span<const double> w,
                               std::span<const double> t) {
  auto m = build_operator(shift, potential, f, w, t);
  const auto s = m.entries.rows();
  // rank one: the only nonzero eigenvalue is the trace. Eigensolvers lose
  // half the digits on the nilpotent cases (t with cancelling phases).
  if (auto lw = bernoulli_log_weights(shift, potential, f, w)) {
    std::complex<double> trace = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) trace += m.entries(i, i);
    return std::abs(trace);
  }
  if (s <= 64) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m.entries, false);
    if (solver.info() != Eigen::Success)
      throw ConvergenceError("complex eigensolver failed", 0.0);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  // growth rate of ||M^k x|| over a long window
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(s);
  for (Eigen::Index i = 0; i < s; ++i) x(i) += std::complex<double>(0.0, 0.001 * static_cast<double>(i % 7));
  x.normalize();
  const int burn = 500, window = 2000;
  double log_growth = 0.0;
  for (int k = 0; k < burn + window; ++k) {
    x = m.entries * x;
    double norm = x.norm();
    if (norm == 0.0) return 0.0;
    if (k >= burn) log_growth += std::log(norm);
    x /= norm;
  }
  return std::exp(log_growth / window);
}

}  // namespace gurevic
