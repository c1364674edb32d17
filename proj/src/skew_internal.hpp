#pragma once

#include <vector>

#include "gurevic/skewprod.hpp"

namespace gurevic::detail {

// pressure(sigma) for transitive shifts, else the largest edge value; DP
// weights are divided by e^{c} to keep layers O(1).
double scaling_constant(const SkewSystem& sys);
// e^{phi(i,j) - c} on allowed edges, row-major.
std::vector<double> scaled_weights(const SkewSystem& sys, double c);
GroupElement target_of(const SkewSystem& sys, const ConstraintMode& mode);

struct RunSpec {
  // start states run in one shared layer; periodic runs use one start each
  std::vector<int> starts;
  // closing weight from the last symbol i: either back to the start (periodic)
  // or into o_1 (preimage)
  int close_to = -1;
  bool periodic = true;
};

std::vector<RunSpec> runs_for(const SkewSystem& sys, const ConstraintMode& mode);

}  // namespace gurevic::detail
