#pragma once

#include <complex>
#include <limits>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gurevic/kernels.hpp"
#include "gurevic/shift.hpp"

namespace gurevic {

// Per-state integer vectors f(i) in Z^d.
using LatticeValues = std::vector<std::vector<std::int64_t>>;

// Zero vectors of dimension 0, one per state: the untwisted case.
LatticeValues no_displacement(int states);

// M(i,j) = A(i,j) exp(phi(i,j) + <w, f(i)> + 2 pi i <t, f(i)>).
// Action convention: (L v)(j) = sum_i M(i,j) v(i).
struct TransferMatrix {
  Eigen::MatrixXcd entries;
  std::vector<double> w;
  std::vector<double> t;
};

// Empty w or t mean zero. Throws ContractError when a nonempty w or t does
// not have the dimension of f.
TransferMatrix build_operator(const ShiftSystem& shift, const Potential& potential,
                              const LatticeValues& f, std::span<const double> w,
                              std::span<const double> t);

// Real twisted matrix divided by e^{offset}, where offset is the largest
// exponent phi(i,j) + <w, f(i)> on an allowed edge. Entries lie in (0, 1].
struct ScaledMatrix {
  DenseMatrix matrix;
  double offset = 0.0;
};
ScaledMatrix real_operator(const ShiftSystem& shift, const Potential& potential,
                           const LatticeValues& f = {}, std::span<const double> w = {});

enum class PerronMethod { automatic, dense, power };

// Leading eigendata of a nonnegative irreducible matrix: M r = lambda r,
// l M = lambda l, l.r = 1, max r = 1.
struct PerronData {
  double lambda = 0.0;
  Eigen::VectorXd right;
  Eigen::VectorXd left;
  double residual = 0.0;  // max of the two relative eigen-residuals
  int iterations = 0;
  std::string method;
  // Second largest eigenvalue modulus when the full spectrum was computed.
  std::optional<double> second_modulus;
};

// Dense eigensolve for up to 64 states, power iteration with a
// Collatz-Wielandt stopping bracket above that. Throws ContractError for a
// non-transitive shift and ConvergenceError when the residual stays above tol.
PerronData perron(const ShiftSystem& shift, const DenseMatrix& m, double tol = 1e-12,
                  PerronMethod method = PerronMethod::automatic,
                  Execution exec = Execution::parallel);

// Full shift with a depth-1 potential: M is rank one and its Gibbs measure is
// Bernoulli with weights proportional to e^{phi(i) + <w, f(i)>}. Returns those
// log-weights, or nullopt for any other system. Spares building S x S matrices
// for large truncations.
std::optional<std::vector<double>> bernoulli_log_weights(const ShiftSystem& shift,
                                                         const Potential& potential,
                                                         const LatticeValues& f = {},
                                                         std::span<const double> w = {});

// log lambda of the w-twisted real matrix, i.e. p(w) = P_G(phi + <w,f>, sigma).
double pressure(const ShiftSystem& shift, const Potential& potential, const LatticeValues& f = {},
                std::span<const double> w = {}, double tol = 1e-12);

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

// (n, (1/n) log trace M^n) for n = 1..n_max with per-step rescaling.
// Zero traces give kMinusInfinity.
std::vector<std::pair<int, double>> pressure_via_periodic(const ShiftSystem& shift,
                                                          const Potential& potential, int n_max);

// trace(M^n), n = 1..n_max, without rescaling (for small n).
std::vector<std::complex<double>> trace_powers(const TransferMatrix& m, int n_max);

// Markov measure of the (possibly w-twisted) potential.
struct GibbsMeasure {
  double pressure = 0.0;
  std::vector<double> stationary;  // p_i = l_i r_i
  DenseMatrix kernel;              // P(i,j) = M(i,j) r_j / (lambda r_i)
  PerronData perron;               // of the scaled matrix
  double offset = 0.0;             // lambda_true = perron.lambda * e^offset
};

GibbsMeasure gibbs(const ShiftSystem& shift, const Potential& potential, const LatticeValues& f = {},
                   std::span<const double> w = {}, double tol = 1e-12);

struct CylinderMass {
  double mass = 0.0;
  bool allowed = true;
};
CylinderMass cylinder_mass(const GibbsMeasure& g, const ShiftSystem& shift, std::span<const int> word);

// Integral of a depth <= 2 function against the measure (via edge marginals).
double integrate(const GibbsMeasure& g, const ShiftSystem& shift, const Potential& function);

struct GibbsBounds {
  double a_emp = 0.0;
  double b_emp = 0.0;
  // min/max of l_i r_j lambda e^{-phi(j,k)} over states i, edges (j,k)
  double envelope_low = 0.0;
  double envelope_high = 0.0;
  std::size_t words = 0;
};

// min and max of mu([w]) e^{nP - phi^n(x_w)} over allowed words of length
// 1..up_to, where x_w continues w periodically when the wrap edge exists and
// otherwise along the shortest return path to w_1.
GibbsBounds gibbs_bounds_check(const GibbsMeasure& g, const ShiftSystem& shift,
                               const Potential& potential, int up_to,
                               int ceiling = kDefaultOracleCeiling);

// Largest eigenvalue modulus of the complex twisted matrix.
double twisted_spectral_radius(const ShiftSystem& shift, const Potential& potential,
                               const LatticeValues& f, std::span<const double> w,
                               std::span<const double> t);

}  // namespace gurevic
