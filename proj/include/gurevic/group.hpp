#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gurevic/shift.hpp"

namespace gurevic {

struct LatticeElement {
  std::vector<std::int64_t> coords;
  bool operator==(const LatticeElement&) const = default;
};

// Reduced word over g1..gk; letter +i is g_i, -i is g_i^{-1}.
struct FreeWord {
  int rank = 0;
  std::vector<std::int8_t> letters;
  bool operator==(const FreeWord&) const = default;
};

// Upper unitriangular integer matrices: (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').
struct HeisenbergElement {
  std::int64_t a = 0, b = 0, c = 0;
  bool operator==(const HeisenbergElement&) const = default;
};

struct CyclicElement {
  std::int64_t residue = 0;
  std::int64_t modulus = 1;
  bool operator==(const CyclicElement&) const = default;
};

using GroupElement = std::variant<LatticeElement, FreeWord, HeisenbergElement, CyclicElement>;

// Throws ContractError when the variants (or their parameters) disagree.
GroupElement multiply(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);
bool is_identity(const GroupElement& g);
std::size_t hash_value(const GroupElement& g);

enum class GroupKind { lattice, free, heisenberg, cyclic };

// One of the built-in finitely generated groups with its fixed symmetric
// generating set: Z^d (+-unit vectors), F_k (g_i^{+-1}), H3 (x^{+-1}, y^{+-1}),
// Z/m (+-1). Z^0 is the trivial group.
class Group {
 public:
  static Group lattice(int dimension);
  static Group free(int rank);
  static Group heisenberg();
  static Group cyclic(int modulus);

  GroupKind kind() const noexcept { return kind_; }
  int parameter() const noexcept { return parameter_; }
  std::string name() const;
  bool amenable() const noexcept { return kind_ != GroupKind::free || parameter_ < 2; }

  GroupElement identity() const;
  const std::vector<GroupElement>& generators() const noexcept { return generators_; }
  bool contains(const GroupElement& g) const;

  // Exact word length for Z^d, F_k and Z/m; for H3 a lower bound.
  int word_length_lower_bound(const GroupElement& g) const;

  // Parse a generator string ("x^-1 y", "g1 g2^-1") or, for Z^d, comma
  // separated integers. "e" and the empty string are the identity.
  GroupElement parse(std::string_view text) const;
  std::string format(const GroupElement& g) const;

  bool operator==(const Group& other) const noexcept {
    return kind_ == other.kind_ && parameter_ == other.parameter_;
  }

 private:
  Group(GroupKind kind, int parameter);
  GroupKind kind_;
  int parameter_;
  std::vector<GroupElement> generators_;
};

// Projection onto the torsion-free abelianization, coordinates in Z^d.
class AbelianizationMap {
 public:
  explicit AbelianizationMap(Group source) : source_(std::move(source)) {}
  int rank() const noexcept;
  std::vector<std::int64_t> apply(const GroupElement& g) const;
  Group target() const { return Group::lattice(rank()); }

 private:
  Group source_;
};

// State-indexed cocycle psi(x) = psi(x_1).
struct Cocycle {
  Group group;
  std::vector<GroupElement> values;

  static Cocycle trivial(int states) {
    return Cocycle{Group::lattice(0), std::vector<GroupElement>(states, LatticeElement{})};
  }
  int states() const noexcept { return static_cast<int>(values.size()); }
  // Largest generator word length among the values.
  int max_step_length() const;
  void validate(int states) const;
};

// psi(w_1) psi(w_2) ... psi(w_n). The periodic flag only asserts the wrap edge.
GroupElement cocycle_product(const Cocycle& cocycle, const ShiftSystem& shift,
                             std::span<const int> word, bool periodic);

// f = pi o psi as a Z^d-valued cocycle.
Cocycle abelianize(const Cocycle& cocycle);

// f as plain integer vectors, one per state.
std::vector<std::vector<std::int64_t>> lattice_values(const Cocycle& cocycle);

inline constexpr std::size_t kDefaultEntryBudget = 200'000'000;

// Elements of word length <= radius, in BFS order, with exact word lengths.
struct Ball {
  std::vector<GroupElement> elements;
  std::vector<int> lengths;
  std::size_t size() const noexcept { return elements.size(); }
};

// Cached per (group, radius); throws BudgetError when the ball would exceed
// `budget` elements.
const Ball& ball(const Group& group, int radius, std::size_t budget = kDefaultEntryBudget);

// Exact word length via the cached ball; -1 if longer than max_radius.
int word_length(const Group& group, const GroupElement& g, int max_radius);

}  // namespace gurevic

template <>
struct std::hash<gurevic::GroupElement> {
  std::size_t operator()(const gurevic::GroupElement& g) const noexcept {
    return gurevic::hash_value(g);
  }
};
