#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "gurevic/error.hpp"
#include "gurevic/skewprod.hpp"

namespace gurevic {

namespace {

std::int64_t max_displacement(const SkewSystem& sys) {
  std::int64_t top = 0;
  for (const auto& row : sys.displacement())
    for (auto v : row) top = std::max(top, static_cast<std::int64_t>(std::llabs(v)));
  return top;
}

// base matrix of M_w divided by its Perron root, and log of that root
struct NormalizedBase {
  DenseMatrix matrix;
  double log_scale = 0.0;
};

NormalizedBase normalized_base(const SkewSystem& sys, const std::vector<double>& w) {
  auto scaled = real_operator(sys.shift(), sys.potential(), sys.displacement(), w);
  double lambda = 1.0;
  if (sys.shift().transitive()) lambda = perron(sys.shift(), scaled.matrix).lambda;
  for (auto& v : scaled.matrix.data) v /= lambda;
  return {std::move(scaled.matrix), scaled.offset + std::log(lambda)};
}

}  // namespace

int nyquist_points(const SkewSystem& sys, int n) {
  return static_cast<int>(2 * static_cast<std::int64_t>(n) * max_displacement(sys) + 1);
}

std::vector<ConstrainedValue> fourier_sequence(const SkewSystem& sys, int n_max,
                                               const std::vector<std::int64_t>& m, int q,
                                               const std::vector<double>& w_in, Execution exec) {
  if (n_max < 1) throw ContractError("n_max must be >= 1");
  const int d = sys.rank();
  if (static_cast<int>(m.size()) != d)
    throw ContractError("target has dimension " + std::to_string(m.size()) + ", cocycle has " +
                        std::to_string(d));
  std::vector<double> w = w_in.empty() ? std::vector<double>(d, 0.0) : w_in;
  if (static_cast<int>(w.size()) != d) throw ContractError("twist dimension mismatch");
  const int needed = nyquist_points(sys, n_max);
  if (q == 0) q = needed;
  if (q < needed)
    throw ContractError("quadrature size " + std::to_string(q) + " is below the Nyquist minimum " +
                        std::to_string(needed) + " for n = " + std::to_string(n_max) +
                        "; the result would alias");

  auto base = normalized_base(sys, w);
  auto moments = torus_trace_moments(base.matrix, sys.displacement(), q, n_max, m, exec);
  const std::int64_t reach = max_displacement(sys);
  std::int64_t extent = 0;
  for (auto v : m) extent = std::max(extent, static_cast<std::int64_t>(std::llabs(v)));
  double wm = 0.0;
  for (int k = 0; k < d; ++k) wm += w[k] * static_cast<double>(m[k]);
  // traces of the normalized matrix are O(S); smaller moments are rounding noise
  const double floor = 1e-12 * static_cast<double>(base.matrix.n);

  std::vector<ConstrainedValue> out;
  for (int n = 1; n <= n_max; ++n) {
    ConstrainedValue v;
    v.n = n;
    v.ball_size = 1;
    for (int k = 0; k < d; ++k) v.ball_size *= static_cast<std::size_t>(q);
    v.radius = q;
    v.method = "fourier";
    double c = moments[n - 1];
    if (extent <= n * reach && c > floor) v.log_value = std::log(c) + n * base.log_scale - wm;
    out.push_back(v);
  }
  return out;
}

ConstrainedValue fourier_constrained_sum(const SkewSystem& sys, int n,
                                         const std::vector<std::int64_t>& m, int q,
                                         const std::vector<double>& w, Execution exec) {
  return fourier_sequence(sys, n, m, q, w, exec).back();
}

LocalLimit local_limit_ratio(const SkewSystem& sys, const std::vector<double>& xi, int n,
                             Execution exec) {
  const int d = sys.rank();
  if (static_cast<int>(xi.size()) != d) throw ContractError("xi dimension mismatch");
  auto base = normalized_base(sys, xi);
  std::vector<std::int64_t> zero(d, 0);
  auto moments = torus_trace_moments(base.matrix, sys.displacement(), nyquist_points(sys, n), n,
                                     zero, exec);
  LocalLimit out;
  out.n = n;
  // Z_n(0) e^{-n p(xi)} is exactly the normalized moment
  out.ratio = std::max(0.0, moments[n - 1]) * std::pow(static_cast<double>(n), 0.5 * d);
  if (sys.shift().mixing()) {
    auto report = check_extension_mixing(sys.abelianized(), 2);
    out.index = report.lattice_index > 0 ? report.lattice_index : 1;
  }
  out.normalized = out.ratio / static_cast<double>(out.index);
  return out;
}

}  // namespace gurevic
