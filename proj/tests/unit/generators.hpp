#pragma once

// Small random systems for property tests. Everything is seeded so failures
// reproduce.

#include <optional>
#include <random>
#include <vector>

#include "gurevic/group.hpp"
#include "gurevic/shift.hpp"
#include "gurevic/skewprod.hpp"

namespace gurevic::gen {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random 0/1 matrix with density p; retried until every state has a
// successor and a predecessor (and, if asked, until transitive).
inline ShiftSystem shift(Rng& rng, int states, double density, bool transitive = true) {
  for (;;) {
    std::vector<std::uint8_t> a(static_cast<std::size_t>(states) * states);
    for (auto& x : a) x = uniform(rng, 0.0, 1.0) < density;
    try {
      ShiftSystem s(states, a);
      if (!s.connected()) continue;
      if (transitive && !s.transitive()) continue;
      return s;
    } catch (const std::exception&) {
    }
  }
}

inline Potential potential(Rng& rng, const ShiftSystem& s, int depth, double scale = 1.0) {
  const int n = s.size();
  if (depth == 1) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, -scale, scale);
    return Potential::per_state(s, v);
  }
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j : s.successors(i)) v[i * n + j] = uniform(rng, -scale, scale);
  return Potential::per_edge(s, v);
}

inline Word allowed_word(Rng& rng, const ShiftSystem& s, int length) {
  Word w{uniform_int(rng, 0, s.size() - 1)};
  while (static_cast<int>(w.size()) < length) {
    const auto& next = s.successors(w.back());
    w.push_back(next[uniform_int(rng, 0, static_cast<int>(next.size()) - 1)]);
  }
  return w;
}

inline GroupElement element(Rng& rng, const Group& g, int length) {
  GroupElement out = g.identity();
  const auto& gens = g.generators();
  for (int k = 0; k < length; ++k)
    out = multiply(out, gens[uniform_int(rng, 0, static_cast<int>(gens.size()) - 1)]);
  return out;
}

inline Cocycle cocycle(Rng& rng, const Group& g, int states, int max_length = 1) {
  Cocycle c{g, {}};
  for (int i = 0; i < states; ++i) c.values.push_back(element(rng, g, uniform_int(rng, 0, max_length)));
  return c;
}

inline std::vector<Group> groups() {
  return {Group::lattice(1), Group::lattice(2), Group::free(2), Group::heisenberg(), Group::cyclic(3)};
}

}  // namespace gurevic::gen
