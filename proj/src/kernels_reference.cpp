#include "kernels_reference.hpp"

#include <cmath>
#include <numbers>

namespace gurevic::reference {

void matvec(const DenseMatrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < m.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
}

void left_matvec(const DenseMatrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t j = 0; j < m.n; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) y[j] += x[i] * m(i, j);
}

namespace {

// Invert the pull tables: push[j][g] = index of g psi(j), or -1.
std::vector<std::vector<std::int32_t>> push_tables(const BallStep& step) {
  std::vector<std::vector<std::int32_t>> push(step.states, std::vector<std::int32_t>(step.size, -1));
  for (std::size_t j = 0; j < step.states; ++j)
    for (std::size_t h = 0; h < step.size; ++h)
      if (auto g = step.pull[j][h]; g >= 0) push[j][g] = static_cast<std::int32_t>(h);
  return push;
}

}  // namespace

void ball_step(const BallStep& step, std::span<const double> in, std::span<double> out,
               int max_length) {
  auto push = push_tables(step);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < step.states; ++i) {
    for (std::size_t g = 0; g < step.size; ++g) {
      double v = in[i * step.size + g];
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < step.states; ++j) {
        double w = step.weight[i * step.states + j];
        if (w == 0.0) continue;
        auto h = push[j][g];
        if (h < 0 || (*step.lengths)[h] > max_length) continue;
        out[j * step.size + h] += w * v;
      }
    }
  }
}

void ball_step_accumulate(const BallStep& step, std::span<const double> edge_values,
                          std::span<const double> in_mass, std::span<const double> in_acc,
                          std::span<double> out_mass, std::span<double> out_acc, int max_length) {
  auto push = push_tables(step);
  std::fill(out_mass.begin(), out_mass.end(), 0.0);
  std::fill(out_acc.begin(), out_acc.end(), 0.0);
  for (std::size_t i = 0; i < step.states; ++i) {
    for (std::size_t g = 0; g < step.size; ++g) {
      double v = in_mass[i * step.size + g];
      double a = in_acc[i * step.size + g];
      if (v == 0.0 && a == 0.0) continue;
      for (std::size_t j = 0; j < step.states; ++j) {
        double w = step.weight[i * step.states + j];
        if (w == 0.0) continue;
        auto h = push[j][g];
        if (h < 0 || (*step.lengths)[h] > max_length) continue;
        out_mass[j * step.size + h] += w * v;
        out_acc[j * step.size + h] += w * (a + edge_values[i * step.states + j] * v);
      }
    }
  }
}

double gather_dot(std::span<const double> a, std::span<const double> b,
                  std::span<const std::int32_t> index) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (index[k] >= 0) s += a[k] * b[index[k]];
  return s;
}

std::vector<double> torus_trace_moments(const DenseMatrix& base,
                                        const std::vector<std::vector<std::int64_t>>& f, int q,
                                        int n_max, std::span<const std::int64_t> target) {
  using C = std::complex<double>;
  const std::size_t s = base.n;
  const std::size_t d = target.size();
  std::size_t nodes = 1;
  for (std::size_t k = 0; k < d; ++k) nodes *= static_cast<std::size_t>(q);

  std::vector<C> total(n_max, 0.0);
  std::vector<C> m(s * s), p(s * s), tmp(s * s);
  std::vector<std::int64_t> node(d);
  for (std::size_t k = 0; k < nodes; ++k) {
    std::size_t rest = k;
    for (std::size_t c = 0; c < d; ++c) {
      node[c] = static_cast<std::int64_t>(rest % q);
      rest /= q;
    }
    auto angle = [&](std::span<const std::int64_t> v) {
      double a = 0.0;
      for (std::size_t c = 0; c < d; ++c) a += static_cast<double>(node[c] * v[c] % q) / q;
      return 2.0 * std::numbers::pi * a;
    };
    for (std::size_t i = 0; i < s; ++i) {
      C phase = std::polar(1.0, angle(f[i]));
      for (std::size_t j = 0; j < s; ++j) m[i * s + j] = base(i, j) * phase;
    }
    C weight = std::polar(1.0, -angle(target));
    p = m;
    for (int n = 1; n <= n_max; ++n) {
      C tr = 0.0;
      for (std::size_t i = 0; i < s; ++i) tr += p[i * s + i];
      total[n - 1] += tr * weight;
      if (n == n_max) break;
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
          C acc = 0.0;
          for (std::size_t l = 0; l < s; ++l) acc += p[i * s + l] * m[l * s + j];
          tmp[i * s + j] = acc;
        }
      std::swap(p, tmp);
    }
  }
  std::vector<double> out(n_max);
  for (int n = 0; n < n_max; ++n) out[n] = total[n].real() / static_cast<double>(nodes);
  return out;
}

}  // namespace gurevic::reference
