#pragma once

// Hot loops shared by transfer, skewprod and equidist. Each kernel has an
// OpenMP implementation and a plain serial reference with the same contract;
// tests check that they agree and bench/ times them against each other.
//
// Reductions are summed in fixed-size blocks combined in index order, so
// results do not depend on the thread count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gurevic {

enum class Execution { serial, parallel };

// Upper bound on OpenMP threads. Initialised from GUREVIC_THREADS when set.
void set_thread_cap(int threads);
int thread_cap();

// Dense row-major square matrix of doubles.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
};

// y = M x (right action, rows of M against x).
void matvec(const DenseMatrix& m, std::span<const double> x, std::span<double> y, Execution exec);
// y = x M (left action).
void left_matvec(const DenseMatrix& m, std::span<const double> x, std::span<double> y,
                 Execution exec);

// One DP layer on a group ball. Layers are laid out as [state][element].
// Moving from (i, g) to (j, g psi(j)) carries weight(i, j). pull[j][h] is the
// index of h psi(j)^{-1} or -1. Entries whose element has word length above
// `max_length` are written as zero (pruned).
struct BallStep {
  std::size_t states = 0;
  std::size_t size = 0;  // ball elements
  std::vector<double> weight;  // states*states
  std::vector<std::vector<std::int32_t>> pull;
  const std::vector<std::int32_t>* lengths = nullptr;
};

void ball_step(const BallStep& step, std::span<const double> in, std::span<double> out,
               int max_length, Execution exec);

// Same step with a second layer carrying sum of edge values g(i, j) along
// the path: out_acc = sum weight * (in_acc + g(i,j) in_mass).
void ball_step_accumulate(const BallStep& step, std::span<const double> edge_values,
                          std::span<const double> in_mass, std::span<const double> in_acc,
                          std::span<double> out_mass, std::span<double> out_acc, int max_length,
                          Execution exec);

// sum_k a[k] * b[index[k]] over k with index[k] >= 0.
double gather_dot(std::span<const double> a, std::span<const double> b,
                  std::span<const std::int32_t> index, Execution exec);

// Torus quadrature of twisted traces. For nodes t on the uniform grid with
// q points per axis, M(t)(i,j) = base(i,j) e^{2 pi i <t, f(i)>}. Returns
// c[n-1] = q^{-d} sum_t trace(M(t)^n) e^{-2 pi i <t, target>} for n = 1..n_max
// (real part; the imaginary part vanishes for real base matrices).
// The parallel version evaluates traces through eigenvalues of each M(t)
// and pairs t with -t; the reference multiplies matrices over the full grid.
std::vector<double> torus_trace_moments(const DenseMatrix& base,
                                        const std::vector<std::vector<std::int64_t>>& f, int q,
                                        int n_max, std::span<const std::int64_t> target,
                                        Execution exec);

}  // namespace gurevic
