#pragma once

// Brute-force enumeration over words. Slow and obviously correct; every
// fast path is tested against these.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gurevic/skewprod.hpp"

namespace gurevic::oracle {

// Calls visit(word, phi^n) for every word of the constrained set, in
// lexicographic order. Preimage words are continued by o_1.
void for_each_constrained(const SkewSystem& sys, int n, const ConstraintMode& mode,
                          const std::function<void(std::span<const int>, double)>& visit,
                          int ceiling = kDefaultOracleCeiling);

double constrained_sum(const SkewSystem& sys, int n, const ConstraintMode& mode,
                       int ceiling = kDefaultOracleCeiling);

// (1/n) sum_j g(sigma^j x) along the word, with the same closing edge as phi.
double orbit_average(const SkewSystem& sys, std::span<const int> word, const ConstraintMode& mode,
                     const Potential& g);

// NaN when the constrained set is empty.
double empirical_integral(const SkewSystem& sys, int n, const ConstraintMode& mode,
                          const Potential& g, int ceiling = kDefaultOracleCeiling);

double tail_mass(const SkewSystem& sys, int n, const ConstraintMode& mode, const Potential& g,
                 double limit, double epsilon, int ceiling = kDefaultOracleCeiling);

// sum over periodic words of e^{phi^n + <w + 2 pi i t, f^n>}.
std::complex<double> twisted_periodic_sum(const ShiftSystem& shift, const Potential& potential,
                                          const LatticeValues& f, const std::vector<double>& w,
                                          const std::vector<double>& t, int n,
                                          int ceiling = kDefaultOracleCeiling);

// Size of the word-length ball by closing the generator set under products.
std::size_t ball_size(const Group& group, int radius);

}  // namespace gurevic::oracle
