#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gurevic/group.hpp"
#include "gurevic/kernels.hpp"
#include "gurevic/shift.hpp"
#include "gurevic/transfer.hpp"

namespace gurevic {

enum class MixingStatus { verified, assumed, failed };
std::string to_string(MixingStatus status);

struct MixingReport {
  MixingStatus status = MixingStatus::assumed;
  std::string method;  // "lattice" or "lattice+reachability"
  int horizon = 0;
  // Hermite basis (rows) of the subgroup of Z^{d+1} generated by the
  // vectors (n, f^n(x)) of periodic points x.
  std::vector<std::vector<std::int64_t>> lattice_basis;
  std::int64_t lattice_index = 0;  // 0 when the subgroup has lower rank
  std::string evidence;
};

// Base shift, potential and state-indexed cocycle, with the abelianized
// displacement f = pi o psi precomputed.
class SkewSystem {
 public:
  SkewSystem(ShiftSystem shift, Potential potential, Cocycle cocycle);

  const ShiftSystem& shift() const noexcept { return shift_; }
  const Potential& potential() const noexcept { return potential_; }
  const Cocycle& cocycle() const noexcept { return cocycle_; }
  const Group& group() const noexcept { return cocycle_.group; }
  AbelianizationMap abelianization() const { return AbelianizationMap(cocycle_.group); }
  const LatticeValues& displacement() const noexcept { return f_; }
  int rank() const noexcept { return f_.empty() ? 0 : static_cast<int>(f_.front().size()); }

  // Same shift and potential with psi replaced by pi o psi.
  SkewSystem abelianized() const;

  const std::optional<MixingReport>& mixing() const noexcept { return mixing_; }
  // Copy carrying the result of check_extension_mixing.
  SkewSystem with_mixing_check(int horizon, std::size_t budget = kDefaultEntryBudget) const;

 private:
  ShiftSystem shift_;
  Potential potential_;
  Cocycle cocycle_;
  LatticeValues f_;
  std::optional<MixingReport> mixing_;
};

// For Z^d-valued (or abelianized) cocycles the lattice generated by all
// cycle vectors is computed exactly; verified iff it is Z^{d+1}. Other
// groups additionally need every (state, g) with |g| <= horizon/2 reached
// at lags horizon-1 and horizon, else the status is "assumed".
// Throws ContractError when the base shift is not mixing.
MixingReport check_extension_mixing(const SkewSystem& sys, int horizon,
                                    std::size_t budget = kDefaultEntryBudget);

// The four constrained families. Target defaults to the identity.
struct ConstraintMode {
  enum class Kind { periodic_all, periodic_cylinder, preimage, preimage_cylinder };
  Kind kind = Kind::periodic_all;
  std::optional<int> cylinder;            // state a, 0-based
  std::optional<BasePoint> base_point;    // o
  std::optional<GroupElement> target;     // empty = identity

  static ConstraintMode periodic_all(std::optional<GroupElement> target = std::nullopt);
  static ConstraintMode periodic_cylinder(int a, std::optional<GroupElement> target = std::nullopt);
  static ConstraintMode preimage(BasePoint o, std::optional<GroupElement> target = std::nullopt);
  static ConstraintMode preimage_cylinder(int a, BasePoint o,
                                          std::optional<GroupElement> target = std::nullopt);

  bool periodic() const noexcept {
    return kind == Kind::periodic_all || kind == Kind::periodic_cylinder;
  }
  std::string name() const;
  void validate(const SkewSystem& sys) const;
};

enum class DpMethod { automatic, dense, hash };

struct DpOptions {
  std::size_t budget = kDefaultEntryBudget;
  Execution exec = Execution::parallel;
  DpMethod method = DpMethod::automatic;
};

// One value Z_n of a constrained sum, kept in log form; log_value is
// kMinusInfinity when the constrained set is empty.
struct ConstrainedValue {
  int n = 0;
  double log_value = kMinusInfinity;
  int radius = 0;
  std::size_t ball_size = 0;
  std::string method;

  double value() const;
  double rate() const { return log_value / n; }
  bool empty() const { return log_value == kMinusInfinity; }
};

// Z_n = sum over the constrained set of e^{phi^n(x)} by forward DP over
// (state, group element). Budget errors name the faster paths.
ConstrainedValue constrained_sum(const SkewSystem& sys, int n, const ConstraintMode& mode,
                                 const DpOptions& options = {});

// Z_n and the e^{phi^n}-weighted mean of (1/n) sum_j g(sigma^j x) over the set.
struct ConstrainedAverage {
  ConstrainedValue sum;
  double average = 0.0;  // NaN when the set is empty
};
ConstrainedAverage constrained_average(const SkewSystem& sys, int n, const ConstraintMode& mode,
                                       const Potential& g, const DpOptions& options = {});

// Z_1..Z_{n_max} for periodic modes by meeting in the middle: one forward
// pass to ceil(n_max/2). Targets other than the identity need an abelian group.
std::vector<ConstrainedValue> constrained_sequence(const SkewSystem& sys, int n_max,
                                                   const ConstraintMode& mode,
                                                   const DpOptions& options = {});

// Identity-return sums for a full shift on 2k states mapped bijectively onto
// the generators of F_k and their inverses, with a constant potential.
bool radial_applicable(const SkewSystem& sys);
ConstrainedValue free_group_radial_sum(const SkewSystem& sys, int n);
std::vector<ConstrainedValue> free_group_radial_sequence(const SkewSystem& sys, int n_max);

// Minimum quadrature size 2 n max|f| + 1.
int nyquist_points(const SkewSystem& sys, int n);

// Z_n(m) = e^{-<w,m>} integral over the torus of trace(M_{w+2 pi i t}^n)
// e^{-2 pi i <t,m>} dt on the uniform grid with q points per axis (0 picks
// the minimum). Uses the abelianized displacement. Throws ContractError when
// q is below nyquist_points(sys, n_max).
std::vector<ConstrainedValue> fourier_sequence(const SkewSystem& sys, int n_max,
                                               const std::vector<std::int64_t>& m, int q = 0,
                                               const std::vector<double>& w = {},
                                               Execution exec = Execution::parallel);
ConstrainedValue fourier_constrained_sum(const SkewSystem& sys, int n,
                                         const std::vector<std::int64_t>& m, int q = 0,
                                         const std::vector<double>& w = {},
                                         Execution exec = Execution::parallel);

struct LocalLimit {
  int n = 0;
  double ratio = 0.0;       // Z_n(0) n^{d/2} e^{-n p(xi)}
  std::int64_t index = 1;   // lattice index used for the normalisation
  double normalized = 0.0;  // ratio / index
};
LocalLimit local_limit_ratio(const SkewSystem& sys, const std::vector<double>& xi, int n,
                             Execution exec = Execution::parallel);

enum class ExtensionMethod { automatic, dense, hash, radial, fourier };
std::string to_string(ExtensionMethod method);

struct PressureEstimate {
  std::vector<ConstrainedValue> sequence;  // n_min..n_max
  std::string method;
  // Least-squares fit of log Z_n = p n + alpha log n + c on the upper half
  // of the range (nonzero terms only).
  double estimate = 0.0;
  double log_exponent = 0.0;  // alpha
  // |p(upper half) - p(whole range)|; the band is estimate +- uncertainty.
  double uncertainty = 0.0;
  double last_value = 0.0;
  // Running max of (log Z_n - 2D)/n, D the row oscillation of phi. Valid
  // lower bounds by supermultiplicativity on full shifts only.
  std::vector<double> lower_bounds;
  bool lower_certified = false;
  // p(xi) of the abelianized system (pressure of sigma when d = 0).
  double upper_bound = 0.0;
  bool prediction_flag = false;  // set when the estimate is a tested prediction
};

PressureEstimate extension_pressure(const SkewSystem& sys, int n_min, int n_max,
                                    const ConstraintMode& mode = ConstraintMode::periodic_all(),
                                    ExtensionMethod method = ExtensionMethod::automatic,
                                    const DpOptions& options = {});

// Least-squares slope of y = p n + alpha log n + c; nullopt with < 3 points.
struct GrowthFit {
  double slope = 0.0;
  double log_exponent = 0.0;
  double intercept = 0.0;
};
std::optional<GrowthFit> fit_growth(const std::vector<int>& n, const std::vector<double>& log_z);

// v_n(j, g) = (L^n 1_{[a] x {e}})(x, g) for x in [j]; returns (1/n) log of
// the l2 norm over g of max_j v_n(j, g) for n = 1..n_max.
std::vector<std::pair<int, double>> l2_norm_growth(const SkewSystem& sys, int n_max, int cylinder,
                                                   const DpOptions& options = {});

struct EtaDiagnostic {
  double value = 0.0;       // sum_{n<=N} t^{-n} v_n(o_1, g)
  double remainder = 0.0;   // geometric bound from the last nonzero terms
  double term_ratio = 0.0;  // observed ratio of consecutive terms
  double identity_value = 0.0;
  double ratio_to_identity = 0.0;  // value / identity_value (NaN if the latter is 0)
  bool reachable = true;
  std::string warning;
};

// Truncated eta_{o,g}(t). Throws ConvergenceError when t <= e^{rho_estimate}
// or the terms are not visibly decaying.
EtaDiagnostic eta_series_diagnostic(const SkewSystem& sys, const BasePoint& o, int cylinder,
                                    const GroupElement& g, double t, int truncation,
                                    double rho_estimate, const DpOptions& options = {});

}  // namespace gurevic
