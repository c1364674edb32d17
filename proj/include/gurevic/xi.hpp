#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gurevic/skewprod.hpp"
#include "gurevic/transfer.hpp"

namespace gurevic {

// p(w) = P_G(phi + <w, f>, sigma) on a finite transitive shift.
class PressureFunction {
 public:
  PressureFunction(ShiftSystem shift, Potential potential, LatticeValues f, double tol = 1e-12);
  explicit PressureFunction(const SkewSystem& sys, double tol = 1e-12);

  int dimension() const noexcept { return dimension_; }
  // +infinity for finite shifts.
  double domain_radius() const noexcept { return std::numeric_limits<double>::infinity(); }

  double value(const std::vector<double>& w) const;
  // grad p(w) = integral of f against mu^w, from the Perron data of M_w.
  std::vector<double> gradient(const std::vector<double>& w) const;

  const ShiftSystem& shift() const noexcept { return shift_; }
  const Potential& potential() const noexcept { return potential_; }
  const LatticeValues& displacement() const noexcept { return f_; }

 private:
  ShiftSystem shift_;
  Potential potential_;
  LatticeValues f_;
  double tol_;
  int dimension_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::vector<double>, double> cache_;
};

double p_eval(const PressureFunction& p, const std::vector<double>& w);
std::vector<double> p_grad(const PressureFunction& p, const std::vector<double>& w);

// Symmetric central-difference Hessian of the exact gradient, Richardson
// extrapolated from steps h and h/2.
std::vector<std::vector<double>> hessian(const PressureFunction& p, const std::vector<double>& w,
                                         double h = 1e-4);

struct XiResult {
  std::vector<double> xi;
  double gradient_norm = 0.0;
  double pressure_at_xi = 0.0;
  std::vector<double> hessian_spectrum;  // ascending
  int iterations = 0;
  // largest distance between the minimizers found from the three starts
  double start_spread = 0.0;
  bool starts_agree = true;
};

// Safeguarded Newton from `init` and two seeded perturbations of it.
// Throws ConvergenceError on iteration cap or when a flat direction is
// found (Hessian eigenvalue below 1e-8 * largest).
XiResult find_xi(const PressureFunction& p, const std::vector<double>& init = {},
                 double tol = 1e-10, std::uint64_t seed = 20240611);

struct AssumptionStatus {
  MixingStatus status = MixingStatus::assumed;
  std::string evidence;
};

struct AssumptionReport {
  AssumptionStatus mixing;       // (I)
  AssumptionStatus summability;  // (II)
  AssumptionStatus minimum;      // (III)
  double delta = std::numeric_limits<double>::infinity();
  std::optional<XiResult> xi;
};

// delta defaults to +infinity (finite shift); pass the family's closed form
// for truncations of countable systems.
AssumptionReport check_assumptions(const SkewSystem& sys, int horizon = 8,
                                   std::optional<double> delta = std::nullopt, double tol = 1e-10,
                                   std::uint64_t seed = 20240611);

}  // namespace gurevic
