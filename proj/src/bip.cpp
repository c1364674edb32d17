#include "gurevic/bip.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gurevic/error.hpp"
#include "gurevic/transfer.hpp"
#include "gurevic/xi.hpp"

namespace gurevic {

TruncationFamily TruncationFamily::zeta(double beta) {
  if (!(beta > 1.0)) throw ContractError("zeta family needs beta > 1 (phi is not summable otherwise)");
  return TruncationFamily("zeta", beta);
}

double TruncationFamily::potential(std::int64_t state) const {
  if (state < 0) throw ContractError("states are nonnegative");
  return -beta_ * std::log(static_cast<double>(state) + 1.0);
}

std::int64_t TruncationFamily::displacement(std::int64_t state) const {
  if (state < 0) throw ContractError("states are nonnegative");
  std::int64_t level = 0;
  for (std::uint64_t m = static_cast<std::uint64_t>(state) + 1; m > 1; m >>= 1) ++level;
  return state % 2 == 0 ? level : -level;
}

double TruncationFamily::tail_bound(double r, std::int64_t after) const {
  // e^{r|f(a)|} <= (a+1)^{r/ln 2}, so the tail is at most sum_{m >= M} m^{-b}
  // with b = beta - r/ln 2 and M = after + 2. For convex m^{-b} that sum is
  // below the integral from M - 1/2.
  const double b = beta_ - r / std::numbers::ln2;
  if (!(b > 1.0)) return std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(std::max<std::int64_t>(after, -1)) + 2.0;
  return std::pow(m - 0.5, 1.0 - b) / (b - 1.0);
}

double TruncationFamily::delta() const { return (beta_ - 1.0) * std::numbers::ln2; }

double TruncationFamily::partition_sum() const { return std::riemann_zeta(beta_); }

TruncatedSystem truncate(const TruncationFamily& family, int size) {
  if (size < 1) throw ContractError("truncation size must be >= 1");
  auto shift = ShiftSystem::full(size);
  std::vector<double> phi(size);
  std::vector<GroupElement> psi(size);
  for (int a = 0; a < size; ++a) {
    phi[a] = family.potential(a);
    psi[a] = LatticeElement{{family.displacement(a)}};
  }
  auto potential = Potential::per_state(shift, std::move(phi));
  return {std::move(shift), std::move(potential), Cocycle{Group::lattice(1), std::move(psi)}};
}

std::vector<ConvergenceRow> convergence_report(const TruncationFamily& family,
                                               const std::vector<int>& sizes, int matrix_budget,
                                               double tol) {
  std::vector<ConvergenceRow> rows;
  for (int size : sizes) {
    if (size > matrix_budget)
      throw BudgetError("truncation at N = " + std::to_string(size),
                        static_cast<std::size_t>(size), static_cast<std::size_t>(matrix_budget));
    auto t = truncate(family, size);
    ConvergenceRow row;
    row.size = size;
    row.pressure = pressure(t.shift, t.potential);
    row.delta = family.delta();
    row.increment = rows.empty() ? 0.0 : row.pressure - rows.back().pressure;
    row.tail = family.tail_bound(0.0, size - 1);
    row.upper_envelope = std::log(std::exp(row.pressure) + row.tail);
    try {
      PressureFunction p(t.shift, t.potential, lattice_values(t.cocycle));
      auto xi = find_xi(p, {}, tol);
      row.xi = xi.xi.front();
      row.pressure_at_xi = xi.pressure_at_xi;
    } catch (const ConvergenceError&) {
      // small truncations where f has one sign have no minimum
      row.xi = row.pressure_at_xi = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gurevic
