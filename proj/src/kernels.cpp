#include "gurevic/kernels.hpp"

#include <omp.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "kernels_reference.hpp"

namespace gurevic {

namespace {

int initial_cap() {
  if (const char* env = std::getenv("GUREVIC_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

std::atomic<int>& cap_storage() {
  static std::atomic<int> cap{initial_cap()};
  return cap;
}

constexpr std::size_t kBlock = 4096;

}  // namespace

void set_thread_cap(int threads) { cap_storage().store(std::max(1, threads)); }
int thread_cap() { return cap_storage().load(); }

void matvec(const DenseMatrix& m, std::span<const double> x, std::span<double> y, Execution exec) {
  if (exec == Execution::serial) return reference::matvec(m, x, y);
  const auto n = static_cast<std::ptrdiff_t>(m.n);
#pragma omp parallel for schedule(static) num_threads(thread_cap())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double* row = &m.data[static_cast<std::size_t>(i) * m.n];
    double s = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void left_matvec(const DenseMatrix& m, std::span<const double> x, std::span<double> y,
                 Execution exec) {
  if (exec == Execution::serial) return reference::left_matvec(m, x, y);
  // threads own blocks of columns and sweep rows inside them, so reads stay
  // contiguous and every y[j] is summed in the reference order
  constexpr std::size_t kColumns = 256;
  const auto blocks = static_cast<std::ptrdiff_t>((m.n + kColumns - 1) / kColumns);
#pragma omp parallel for schedule(static) num_threads(thread_cap())
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t j0 = static_cast<std::size_t>(b) * kColumns, j1 = std::min(m.n, j0 + kColumns);
    for (std::size_t j = j0; j < j1; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
      const double xi = x[i];
      const double* row = &m.data[i * m.n];
      for (std::size_t j = j0; j < j1; ++j) y[j] += xi * row[j];
    }
  }
}

void ball_step(const BallStep& step, std::span<const double> in, std::span<double> out,
               int max_length, Execution exec) {
  if (exec == Execution::serial) return reference::ball_step(step, in, out, max_length);
  const std::size_t S = step.states;
  const auto B = static_cast<std::ptrdiff_t>(step.size);
  const auto& len = *step.lengths;
#pragma omp parallel for schedule(static) num_threads(thread_cap())
  for (std::ptrdiff_t h = 0; h < B; ++h) {
    const bool keep = len[h] <= max_length;
    for (std::size_t j = 0; j < S; ++j) {
      double s = 0.0;
      auto src = step.pull[j][h];
      if (keep && src >= 0)
        for (std::size_t i = 0; i < S; ++i) s += step.weight[i * S + j] * in[i * step.size + src];
      out[j * step.size + h] = s;
    }
  }
}

void ball_step_accumulate(const BallStep& step, std::span<const double> edge_values,
                          std::span<const double> in_mass, std::span<const double> in_acc,
                          std::span<double> out_mass, std::span<double> out_acc, int max_length,
                          Execution exec) {
  if (exec == Execution::serial)
    return reference::ball_step_accumulate(step, edge_values, in_mass, in_acc, out_mass, out_acc,
                                           max_length);
  const std::size_t S = step.states;
  const auto B = static_cast<std::ptrdiff_t>(step.size);
  const auto& len = *step.lengths;
#pragma omp parallel for schedule(static) num_threads(thread_cap())
  for (std::ptrdiff_t h = 0; h < B; ++h) {
    const bool keep = len[h] <= max_length;
    for (std::size_t j = 0; j < S; ++j) {
      double m = 0.0, a = 0.0;
      auto src = step.pull[j][h];
      if (keep && src >= 0) {
        for (std::size_t i = 0; i < S; ++i) {
          double w = step.weight[i * S + j];
          double v = in_mass[i * step.size + src];
          m += w * v;
          a += w * (in_acc[i * step.size + src] + edge_values[i * S + j] * v);
        }
      }
      out_mass[j * step.size + h] = m;
      out_acc[j * step.size + h] = a;
    }
  }
}

double gather_dot(std::span<const double> a, std::span<const double> b,
                  std::span<const std::int32_t> index, Execution exec) {
  if (exec == Execution::serial) return reference::gather_dot(a, b, index);
  const std::size_t blocks = (a.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_cap())
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
    std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    std::size_t hi = std::min(a.size(), lo + kBlock);
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k)
      if (index[k] >= 0) s += a[k] * b[index[k]];
    partial[blk] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

std::vector<double> torus_trace_moments(const DenseMatrix& base,
                                        const std::vector<std::vector<std::int64_t>>& f, int q,
                                        int n_max, std::span<const std::int64_t> target,
                                        Execution exec) {
  if (exec == Execution::serial) return reference::torus_trace_moments(base, f, q, n_max, target);
  using C = std::complex<double>;
  const std::size_t s = base.n;
  const std::size_t d = target.size();
  std::size_t nodes = 1;
  for (std::size_t k = 0; k < d; ++k) nodes *= static_cast<std::size_t>(q);

  constexpr std::size_t kNodeBlock = 64;
  const std::size_t blocks = (nodes + kNodeBlock - 1) / kNodeBlock;
  std::vector<double> partial(blocks * static_cast<std::size_t>(n_max), 0.0);

#pragma omp parallel num_threads(thread_cap())
  {
    Eigen::MatrixXcd m(s, s);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
    std::vector<std::int64_t> node(d), mirror(d);
    std::vector<C> power(s);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
      double* out = &partial[static_cast<std::size_t>(blk) * n_max];
      std::size_t lo = static_cast<std::size_t>(blk) * kNodeBlock;
      std::size_t hi = std::min(nodes, lo + kNodeBlock);
      for (std::size_t k = lo; k < hi; ++k) {
        // index of -t; visit each {t, -t} pair once
        std::size_t rest = k, neg = 0, stride = 1;
        for (std::size_t c = 0; c < d; ++c) {
          node[c] = static_cast<std::int64_t>(rest % q);
          rest /= q;
          mirror[c] = (q - node[c]) % q;
          neg += static_cast<std::size_t>(mirror[c]) * stride;
          stride *= static_cast<std::size_t>(q);
        }
        if (neg < k) continue;
        const double mult = neg == k ? 1.0 : 2.0;
        auto angle = [&](std::span<const std::int64_t> v) {
          double a = 0.0;
          for (std::size_t c = 0; c < d; ++c) a += static_cast<double>(node[c] * v[c] % q) / q;
          return 2.0 * std::numbers::pi * a;
        };
        for (std::size_t i = 0; i < s; ++i) {
          C phase = std::polar(1.0, angle(f[i]));
          for (std::size_t j = 0; j < s; ++j) m(i, j) = base(i, j) * phase;
        }
        C weight = std::polar(1.0, -angle(target)) * mult;
        solver.compute(m, false);
        const auto& ev = solver.eigenvalues();
        for (std::size_t i = 0; i < s; ++i) power[i] = ev(i);
        for (int n = 1; n <= n_max; ++n) {
          C tr = 0.0;
          for (std::size_t i = 0; i < s; ++i) tr += power[i];
          out[n - 1] += (tr * weight).real();
          for (std::size_t i = 0; i < s; ++i) power[i] *= ev(i);
        }
      }
    }
  }
  std::vector<double> total(n_max, 0.0);
  for (std::size_t blk = 0; blk < blocks; ++blk)
    for (int n = 0; n < n_max; ++n) total[n] += partial[blk * n_max + n];
  for (auto& v : total) v /= static_cast<double>(nodes);
  return total;
}

}  // namespace gurevic
