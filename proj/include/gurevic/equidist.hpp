#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gurevic/skewprod.hpp"

namespace gurevic {

struct EmpiricalIntegral {
  int n = 0;
  double value = 0.0;  // NaN when the constrained set is empty
  double log_mass = kMinusInfinity;
  std::string method;
  std::string diagnosis;  // filled when empty
  bool empty() const { return log_mass == kMinusInfinity; }
};

// Integral of g against the empirical measure of the constrained set, by the
// accumulator DP (mass and g-weighted mass per DP state).
EmpiricalIntegral empirical_integral(const SkewSystem& sys, const ConstraintMode& mode, int n,
                                     const Potential& g, const DpOptions& options = {});

// xi of the abelianized system (empty for d = 0).
std::vector<double> default_xi(const SkewSystem& sys, double tol = 1e-10);
// Integral of g against mu^xi from the Gibbs edge marginals.
double gibbs_limit(const SkewSystem& sys, const Potential& g, const std::vector<double>& xi);

struct EquidistRow {
  std::string mode;
  int n = 0;
  double empirical = 0.0;
  double limit = 0.0;
  double abs_diff = 0.0;
  std::string error;  // budget or empty-set note; the run continues
};

struct EquidistReport {
  std::vector<double> xi;
  double limit = 0.0;
  std::vector<EquidistRow> rows;  // modes outer, n inner
};

EquidistReport equidist_report(const SkewSystem& sys, const Potential& g,
                               const std::vector<int>& n_list,
                               const std::vector<ConstraintMode>& modes,
                               const DpOptions& options = {},
                               std::optional<std::vector<double>> xi = std::nullopt);

struct TailRow {
  int n = 0;
  double epsilon = 0.0;
  double tail_mass = 0.0;  // NaN when the constrained set is empty
  std::string method;      // "level-dp" or "brute-force"
};

// log tail = intercept - eta n over rows with positive tail mass.
struct TailFit {
  double eta = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual = 0.0;  // rms residual of the log-linear fit
  int points = 0;
};

// Normalised weight of orbits in the set whose g-average is more than
// epsilon away from `limit`. Uses an exact DP over (state, element, level)
// when q*g is integral for some q <= 1000, else brute force.
TailRow ld_tail_mass(const SkewSystem& sys, const ConstraintMode& mode, const Potential& g,
                     double limit, double epsilon, int n, const DpOptions& options = {},
                     int ceiling = kDefaultOracleCeiling);

struct LdReport {
  double limit = 0.0;
  std::vector<TailRow> rows;
  std::optional<TailFit> fit;  // needs two rows with positive tail mass
};

LdReport ld_tail(const SkewSystem& sys, const Potential& g, double epsilon,
                 const std::vector<int>& n_list, const ConstraintMode& mode,
                 std::optional<double> limit = std::nullopt, const DpOptions& options = {});

std::optional<TailFit> fit_tail(const std::vector<TailRow>& rows);

}  // namespace gurevic
