#include "gurevic/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

#include "gurevic/error.hpp"

namespace gurevic::oracle {

namespace {

std::optional<int> closing_symbol(const ConstraintMode& mode) {
  if (mode.periodic()) return std::nullopt;
  return mode.base_point->first();
}

}  // namespace

void for_each_constrained(const SkewSystem& sys, int n, const ConstraintMode& mode,
                          const std::function<void(std::span<const int>, double)>& visit,
                          int ceiling) {
  mode.validate(sys);
  const auto& shift = sys.shift();
  const GroupElement target = mode.target ? *mode.target : sys.group().identity();
  std::optional<int> first;
  if (mode.cylinder) first = *mode.cylinder;
  auto stream = mode.periodic()
                    ? WordStream::periodic(shift, n, ceiling)
                    : WordStream::preimages(shift, n, mode.base_point->first(), first, ceiling);
  const auto close = closing_symbol(mode);
  Word w;
  while (stream.next(w)) {
    if (mode.periodic() && first && w.front() != *first) continue;
    if (!(cocycle_product(sys.cocycle(), shift, w, false) == target)) continue;
    visit(w, birkhoff_sum(shift, sys.potential(), w, mode.periodic(), close));
  }
}

double constrained_sum(const SkewSystem& sys, int n, const ConstraintMode& mode, int ceiling) {
  double total = 0.0;
  for_each_constrained(sys, n, mode, [&](std::span<const int>, double phi) { total += std::exp(phi); },
                       ceiling);
  return total;
}

double orbit_average(const SkewSystem& sys, std::span<const int> word, const ConstraintMode& mode,
                     const Potential& g) {
  return birkhoff_sum(sys.shift(), g, word, mode.periodic(), closing_symbol(mode)) /
         static_cast<double>(word.size());
}

double empirical_integral(const SkewSystem& sys, int n, const ConstraintMode& mode,
                          const Potential& g, int ceiling) {
  double mass = 0.0, acc = 0.0;
  for_each_constrained(
      sys, n, mode,
      [&](std::span<const int> w, double phi) {
        double e = std::exp(phi);
        mass += e;
        acc += e * orbit_average(sys, w, mode, g);
      },
      ceiling);
  return mass > 0.0 ? acc / mass : std::numeric_limits<double>::quiet_NaN();
}

double tail_mass(const SkewSystem& sys, int n, const ConstraintMode& mode, const Potential& g,
                 double limit, double epsilon, int ceiling) {
  double mass = 0.0, tail = 0.0;
  for_each_constrained(
      sys, n, mode,
      [&](std::span<const int> w, double phi) {
        double e = std::exp(phi);
        mass += e;
        if (std::abs(orbit_average(sys, w, mode, g) - limit) > epsilon) tail += e;
      },
      ceiling);
  return mass > 0.0 ? tail / mass : std::numeric_limits<double>::quiet_NaN();
}

std::complex<double> twisted_periodic_sum(const ShiftSystem& shift, const Potential& potential,
                                          const LatticeValues& f, const std::vector<double>& w,
                                          const std::vector<double>& t, int n, int ceiling) {
  const std::size_t d = f.empty() ? 0 : f.front().size();
  if (w.size() != d || t.size() != d) throw ContractError("twist dimension mismatch");
  std::complex<double> total = 0.0;
  auto stream = WordStream::periodic(shift, n, ceiling);
  Word word;
  while (stream.next(word)) {
    std::complex<double> exponent = birkhoff_sum(shift, potential, word, true);
    for (std::size_t k = 0; k < d; ++k) {
      double fn = 0.0;
      for (int s : word) fn += static_cast<double>(f[s][k]);
      exponent += std::complex<double>(w[k] * fn, 2.0 * std::numbers::pi * t[k] * fn);
    }
    total += std::exp(exponent);
  }
  return total;
}

std::size_t ball_size(const Group& group, int radius) {
  const auto& gens = group.generators();
  std::unordered_set<GroupElement> seen{group.identity()};
  std::vector<GroupElement> frontier{group.identity()};
  // every generator string of length r, multiplied out
  for (int r = 1; r <= radius; ++r) {
    std::vector<GroupElement> next;
    next.reserve(frontier.size() * gens.size());
    for (const auto& g : frontier)
      for (const auto& s : gens) {
        auto h = multiply(g, s);
        seen.insert(h);
        next.push_back(std::move(h));
      }
    frontier = std::move(next);
  }
  return seen.size();
}

}  // namespace gurevic::oracle
