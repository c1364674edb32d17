#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gurevic/group.hpp"
#include "gurevic/shift.hpp"

namespace gurevic {

// Countable full shift over {0,1,2,...} with closed-form tails.
// Built in: "zeta", phi(a) = -beta log(a+1), f(a) = (-1)^a floor(log2(a+1)).
class TruncationFamily {
 public:
  static TruncationFamily zeta(double beta);

  const std::string& name() const noexcept { return name_; }
  double beta() const noexcept { return beta_; }
  double potential(std::int64_t state) const;
  std::int64_t displacement(std::int64_t state) const;

  // Closed-form upper bound on T(r, after) = sum_{a > after} e^{phi(a) + r|f(a)|}.
  // +infinity when the tail diverges.
  double tail_bound(double r, std::int64_t after) const;
  // sup{ r >= 0 : phi + r|f| summable } = (beta - 1) ln 2.
  double delta() const;
  // sum_{a >= 0} e^{phi(a)} = zeta(beta).
  double partition_sum() const;

 private:
  TruncationFamily(std::string name, double beta) : name_(std::move(name)), beta_(beta) {}
  std::string name_;
  double beta_;
};

struct TruncatedSystem {
  ShiftSystem shift;
  Potential potential;
  Cocycle cocycle;
};

// Full shift on states {0..size-1} carrying the family's phi and f.
TruncatedSystem truncate(const TruncationFamily& family, int size);

struct ConvergenceRow {
  int size = 0;
  double pressure = 0.0;        // P_G(phi) of the truncation
  double pressure_at_xi = 0.0;  // p_N(xi_N)
  double xi = 0.0;
  double delta = 0.0;
  double increment = 0.0;       // pressure - previous row's pressure (0 for the first row)
  double tail = 0.0;            // tail_bound(0, size-1)
  double upper_envelope = 0.0;  // log(e^pressure + tail)
};

// Rows in the order of `sizes`; each size must be >= 1 and <= budget.
std::vector<ConvergenceRow> convergence_report(const TruncationFamily& family,
                                               const std::vector<int>& sizes,
                                               int matrix_budget = 4096, double tol = 1e-10);

}  // namespace gurevic
