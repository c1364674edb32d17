#include "gurevic/group.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "gurevic/error.hpp"

namespace gurevic {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the running value
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

std::int64_t mod(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

[[noreturn]] void mismatch() { throw ContractError("group element variant mismatch"); }

struct Multiply {
  GroupElement operator()(const LatticeElement& g, const LatticeElement& h) const {
    if (g.coords.size() != h.coords.size()) mismatch();
    LatticeElement out = g;
    for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += h.coords[i];
    return out;
  }
  GroupElement operator()(const FreeWord& g, const FreeWord& h) const {
    if (g.rank != h.rank) mismatch();
    FreeWord out = g;
    for (auto letter : h.letters) {
      if (!out.letters.empty() && out.letters.back() == -letter)
        out.letters.pop_back();
      else
        out.letters.push_back(letter);
    }
    return out;
  }
  GroupElement operator()(const HeisenbergElement& g, const HeisenbergElement& h) const {
    return HeisenbergElement{g.a + h.a, g.b + h.b, g.c + h.c + g.a * h.b};
  }
  GroupElement operator()(const CyclicElement& g, const CyclicElement& h) const {
    if (g.modulus != h.modulus) mismatch();
    return CyclicElement{mod(g.residue + h.residue, g.modulus), g.modulus};
  }
  template <class A, class B>
  GroupElement operator()(const A&, const B&) const {
    mismatch();
  }
};

struct Invert {
  GroupElement operator()(const LatticeElement& g) const {
    LatticeElement out = g;
    for (auto& c : out.coords) c = -c;
    return out;
  }
  GroupElement operator()(const FreeWord& g) const {
    FreeWord out{g.rank, {}};
    out.letters.reserve(g.letters.size());
    for (auto it = g.letters.rbegin(); it != g.letters.rend(); ++it) out.letters.push_back(-*it);
    return out;
  }
  GroupElement operator()(const HeisenbergElement& g) const {
    return HeisenbergElement{-g.a, -g.b, g.a * g.b - g.c};
  }
  GroupElement operator()(const CyclicElement& g) const {
    return CyclicElement{mod(-g.residue, g.modulus), g.modulus};
  }
};

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

GroupElement power(const GroupElement& g, std::int64_t k) {
  GroupElement base = k < 0 ? inverse(g) : g;
  GroupElement out = multiply(base, inverse(base));
  for (std::int64_t i = 0; i < std::abs(k); ++i) out = multiply(out, base);
  return out;
}

}  // namespace

GroupElement multiply(const GroupElement& g, const GroupElement& h) {
  return std::visit(Multiply{}, g, h);
}

GroupElement inverse(const GroupElement& g) { return std::visit(Invert{}, g); }

bool is_identity(const GroupElement& g) {
  return std::visit(
      [](const auto& e) -> bool {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, LatticeElement>)
          return std::all_of(e.coords.begin(), e.coords.end(), [](auto c) { return c == 0; });
        else if constexpr (std::is_same_v<T, FreeWord>)
          return e.letters.empty();
        else if constexpr (std::is_same_v<T, HeisenbergElement>)
          return e.a == 0 && e.b == 0 && e.c == 0;
        else
          return e.residue == 0;
      },
      g);
}

std::size_t hash_value(const GroupElement& g) {
  std::uint64_t h = mix(0, g.index());
  std::visit(
      [&h](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, LatticeElement>) {
          for (auto c : e.coords) h = mix(h, static_cast<std::uint64_t>(c));
        } else if constexpr (std::is_same_v<T, FreeWord>) {
          for (auto l : e.letters) h = mix(h, static_cast<std::uint64_t>(l));
        } else if constexpr (std::is_same_v<T, HeisenbergElement>) {
          h = mix(mix(mix(h, static_cast<std::uint64_t>(e.a)), static_cast<std::uint64_t>(e.b)),
                  static_cast<std::uint64_t>(e.c));
        } else {
          h = mix(h, static_cast<std::uint64_t>(e.residue));
        }
      },
      g);
  return static_cast<std::size_t>(h);
}

Group::Group(GroupKind kind, int parameter) : kind_(kind), parameter_(parameter) {
  switch (kind_) {
    case GroupKind::lattice:
      for (int i = 0; i < parameter_; ++i) {
        LatticeElement up{std::vector<std::int64_t>(parameter_, 0)};
        up.coords[i] = 1;
        LatticeElement down = up;
        down.coords[i] = -1;
        generators_.push_back(up);
        generators_.push_back(down);
      }
      break;
    case GroupKind::free:
      for (int i = 1; i <= parameter_; ++i) {
        generators_.push_back(FreeWord{parameter_, {static_cast<std::int8_t>(i)}});
        generators_.push_back(FreeWord{parameter_, {static_cast<std::int8_t>(-i)}});
      }
      break;
    case GroupKind::heisenberg:
      generators_ = {HeisenbergElement{1, 0, 0}, HeisenbergElement{-1, 0, 0},
                     HeisenbergElement{0, 1, 0}, HeisenbergElement{0, -1, 0}};
      break;
    case GroupKind::cyclic:
      if (parameter_ > 1) generators_.push_back(CyclicElement{1, parameter_});
      if (parameter_ > 2) generators_.push_back(CyclicElement{parameter_ - 1, parameter_});
      break;
  }
}

Group Group::lattice(int dimension) {
  if (dimension < 0) throw ValidationError("lattice dimension must be >= 0");
  return Group(GroupKind::lattice, dimension);
}
Group Group::free(int rank) {
  if (rank < 1 || rank > 100) throw ValidationError("free group rank must be in 1..100");
  return Group(GroupKind::free, rank);
}
Group Group::heisenberg() { return Group(GroupKind::heisenberg, 3); }
Group Group::cyclic(int modulus) {
  if (modulus < 1) throw ValidationError("cyclic group order must be >= 1");
  return Group(GroupKind::cyclic, modulus);
}

std::string Group::name() const {
  switch (kind_) {
    case GroupKind::lattice:
      return "zd " + std::to_string(parameter_);
    case GroupKind::free:
      return "free " + std::to_string(parameter_);
    case GroupKind::heisenberg:
      return "heisenberg";
    case GroupKind::cyclic:
      return "cyclic " + std::to_string(parameter_);
  }
  return "?";
}

GroupElement Group::identity() const {
  switch (kind_) {
    case GroupKind::lattice:
      return LatticeElement{std::vector<std::int64_t>(parameter_, 0)};
    case GroupKind::free:
      return FreeWord{parameter_, {}};
    case GroupKind::heisenberg:
      return HeisenbergElement{};
    case GroupKind::cyclic:
      return CyclicElement{0, parameter_};
  }
  return HeisenbergElement{};
}

bool Group::contains(const GroupElement& g) const {
  switch (kind_) {
    case GroupKind::lattice:
      return std::holds_alternative<LatticeElement>(g) &&
             std::get<LatticeElement>(g).coords.size() == static_cast<std::size_t>(parameter_);
    case GroupKind::free: {
      if (!std::holds_alternative<FreeWord>(g)) return false;
      const auto& w = std::get<FreeWord>(g);
      if (w.rank != parameter_) return false;
      for (std::size_t i = 0; i < w.letters.size(); ++i) {
        if (w.letters[i] == 0 || std::abs(w.letters[i]) > parameter_) return false;
        if (i > 0 && w.letters[i] == -w.letters[i - 1]) return false;
      }
      return true;
    }
    case GroupKind::heisenberg:
      return std::holds_alternative<HeisenbergElement>(g);
    case GroupKind::cyclic:
      return std::holds_alternative<CyclicElement>(g) &&
             std::get<CyclicElement>(g).modulus == parameter_;
  }
  return false;
}

int Group::word_length_lower_bound(const GroupElement& g) const {
  return std::visit(
      [](const auto& e) -> int {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, LatticeElement>) {
          std::int64_t s = 0;
          for (auto c : e.coords) s += std::abs(c);
          return static_cast<int>(s);
        } else if constexpr (std::is_same_v<T, FreeWord>) {
          return static_cast<int>(e.letters.size());
        } else if constexpr (std::is_same_v<T, HeisenbergElement>) {
          // |c| <= (#x letters)(#y letters) <= (L/2)^2
          auto planar = std::abs(e.a) + std::abs(e.b);
          auto area = static_cast<std::int64_t>(
              std::ceil(2.0 * std::sqrt(static_cast<double>(std::abs(e.c))) - 1e-9));
          return static_cast<int>(std::max(planar, area));
        } else {
          return static_cast<int>(std::min(e.residue, e.modulus - e.residue));
        }
      },
      g);
}

GroupElement Group::parse(std::string_view text) const {
  auto fail = [&](const std::string& why) -> GroupElement {
    throw ValidationError("cannot parse group word '" + std::string(text) + "' for " + name() +
                          ": " + why);
  };
  std::string trimmed(text);
  trimmed.erase(0, trimmed.find_first_not_of(" \t"));
  trimmed.erase(trimmed.find_last_not_of(" \t") + 1);
  if (trimmed.empty() || trimmed == "e") return identity();

  // tuple forms as printed by format()
  const bool tuple = trimmed.size() >= 2 && trimmed.front() == '(' && trimmed.back() == ')';
  if (tuple) trimmed = trimmed.substr(1, trimmed.size() - 2);
  if (kind_ == GroupKind::heisenberg && tuple) {
    std::vector<std::int64_t> v;
    std::string item;
    std::istringstream in(trimmed);
    while (std::getline(in, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      auto x = to_int(item);
      if (!x) return fail("bad integer '" + item + "'");
      v.push_back(*x);
    }
    if (v.size() != 3) return fail("expected (a,b,c)");
    return HeisenbergElement{v[0], v[1], v[2]};
  }
  if (kind_ == GroupKind::lattice &&
      (tuple || trimmed.find(',') != std::string::npos || to_int(trimmed).has_value())) {
    LatticeElement out;
    std::string item;
    std::istringstream in(trimmed);
    while (std::getline(in, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      auto v = to_int(item);
      if (!v) return fail("bad integer '" + item + "'");
      out.coords.push_back(*v);
    }
    if (out.coords.size() != static_cast<std::size_t>(parameter_))
      return fail("expected " + std::to_string(parameter_) + " coordinates");
    return out;
  }
  if (kind_ == GroupKind::cyclic) {
    std::string residue = trimmed.substr(0, trimmed.find(" mod "));
    if (auto v = to_int(residue)) return CyclicElement{mod(*v, parameter_), parameter_};
  }

  auto generator = [&](const std::string& name) -> std::optional<GroupElement> {
    static const std::string xyz = "xyz";
    int index = -1;  // 0-based generator number
    if (name.size() == 1 && xyz.find(name[0]) != std::string::npos) {
      index = static_cast<int>(xyz.find(name[0]));
    } else if (name.size() > 1 && (name[0] == 'g' || name[0] == 'e')) {
      if (auto v = to_int(name.substr(1)); v && *v >= 1) index = static_cast<int>(*v - 1);
    } else if (name == "g" && kind_ == GroupKind::cyclic) {
      index = 0;
    }
    if (index < 0) return std::nullopt;
    switch (kind_) {
      case GroupKind::lattice:
      case GroupKind::free:
        if (index >= parameter_) return std::nullopt;
        return generators_[2 * index];
      case GroupKind::heisenberg:
        if (index == 2) return HeisenbergElement{0, 0, 1};
        return generators_[2 * index];
      case GroupKind::cyclic:
        if (index != 0 || generators_.empty()) return std::nullopt;
        return generators_[0];
    }
    return std::nullopt;
  };

  GroupElement out = identity();
  for (const auto& token : split_ws(trimmed)) {
    std::string base = token;
    std::int64_t exponent = 1;
    if (auto caret = token.find('^'); caret != std::string::npos) {
      base = token.substr(0, caret);
      auto v = to_int(token.substr(caret + 1));
      if (!v) return fail("bad exponent in '" + token + "'");
      exponent = *v;
    }
    auto g = generator(base);
    if (!g) return fail("unknown generator '" + base + "'");
    out = multiply(out, power(*g, exponent));
  }
  return out;
}

std::string Group::format(const GroupElement& g) const {
  std::ostringstream out;
  std::visit(
      [&out](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, LatticeElement>) {
          out << '(';
          for (std::size_t i = 0; i < e.coords.size(); ++i) out << (i ? "," : "") << e.coords[i];
          out << ')';
        } else if constexpr (std::is_same_v<T, FreeWord>) {
          if (e.letters.empty()) out << 'e';
          for (std::size_t i = 0; i < e.letters.size(); ++i) {
            out << (i ? " " : "") << 'g' << std::abs(e.letters[i]);
            if (e.letters[i] < 0) out << "^-1";
          }
        } else if constexpr (std::is_same_v<T, HeisenbergElement>) {
          out << '(' << e.a << ',' << e.b << ',' << e.c << ')';
        } else {
          out << e.residue << " mod " << e.modulus;
        }
      },
      g);
  return out.str();
}

int AbelianizationMap::rank() const noexcept {
  switch (source_.kind()) {
    case GroupKind::lattice:
    case GroupKind::free:
      return source_.parameter();
    case GroupKind::heisenberg:
      return 2;
    case GroupKind::cyclic:
      return 0;
  }
  return 0;
}

std::vector<std::int64_t> AbelianizationMap::apply(const GroupElement& g) const {
  if (!source_.contains(g)) mismatch();
  return std::visit(
      [this](const auto& e) -> std::vector<std::int64_t> {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, LatticeElement>) {
          return e.coords;
        } else if constexpr (std::is_same_v<T, FreeWord>) {
          std::vector<std::int64_t> sums(rank(), 0);
          for (auto l : e.letters) sums[std::abs(l) - 1] += l > 0 ? 1 : -1;
          return sums;
        } else if constexpr (std::is_same_v<T, HeisenbergElement>) {
          return {e.a, e.b};
        } else {
          return {};
        }
      },
      g);
}

int Cocycle::max_step_length() const {
  int longest = 0;
  for (const auto& v : values) {
    int lb = group.word_length_lower_bound(v);
    int len = group.kind() == GroupKind::heisenberg ? word_length(group, v, std::max(lb, 1) + 8) : lb;
    if (len < 0) throw BudgetError("cocycle value too long to measure", 0, 0);
    longest = std::max(longest, len);
  }
  return longest;
}

void Cocycle::validate(int states) const {
  if (static_cast<int>(values.size()) != states)
    throw ValidationError("cocycle has " + std::to_string(values.size()) + " values for " +
                          std::to_string(states) + " states");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!group.contains(values[i]))
      throw ValidationError("cocycle value for state " + std::to_string(i + 1) +
                            " is not an element of " + group.name());
}

GroupElement cocycle_product(const Cocycle& cocycle, const ShiftSystem& shift,
                             std::span<const int> word, bool periodic) {
  if (!shift.allows(word)) throw ContractError("word is not allowed");
  if (periodic && !shift.allows_periodic(word))
    throw ContractError("periodic product requested but wrap edge is forbidden");
  GroupElement out = cocycle.group.identity();
  for (int s : word) out = multiply(out, cocycle.values.at(s));
  return out;
}

Cocycle abelianize(const Cocycle& cocycle) {
  AbelianizationMap pi(cocycle.group);
  Cocycle out{pi.target(), {}};
  for (const auto& v : cocycle.values) out.values.push_back(LatticeElement{pi.apply(v)});
  return out;
}

std::vector<std::vector<std::int64_t>> lattice_values(const Cocycle& cocycle) {
  if (cocycle.group.kind() != GroupKind::lattice)
    throw ContractError("lattice_values needs a Z^d cocycle");
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& v : cocycle.values) out.push_back(std::get<LatticeElement>(v).coords);
  return out;
}

namespace {

struct BallCache {
  std::shared_mutex mutex;
  std::map<std::tuple<int, int, int>, std::unique_ptr<Ball>> balls;
};

BallCache& ball_cache() {
  static BallCache cache;
  return cache;
}

std::unique_ptr<Ball> build_ball(const Group& group, int radius, std::size_t budget) {
  auto out = std::make_unique<Ball>();
  std::unordered_map<GroupElement, int> seen;
  out->elements.push_back(group.identity());
  out->lengths.push_back(0);
  seen.emplace(group.identity(), 0);
  std::size_t layer_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    std::size_t layer_end = out->elements.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (const auto& s : group.generators()) {
        GroupElement next = multiply(out->elements[i], s);
        if (seen.emplace(next, r).second) {
          out->elements.push_back(std::move(next));
          out->lengths.push_back(r);
          if (out->elements.size() > budget)
            throw BudgetError("ball of radius " + std::to_string(radius) + " in " + group.name(),
                              out->elements.size(), budget);
        }
      }
    }
    layer_begin = layer_end;
  }
  return out;
}

}  // namespace

const Ball& ball(const Group& group, int radius, std::size_t budget) {
  if (radius < 0) throw ContractError("ball radius must be >= 0");
  auto key = std::make_tuple(static_cast<int>(group.kind()), group.parameter(), radius);
  auto& cache = ball_cache();
  {
    std::shared_lock lock(cache.mutex);
    if (auto it = cache.balls.find(key); it != cache.balls.end()) return *it->second;
  }
  auto built = build_ball(group, radius, budget);
  std::unique_lock lock(cache.mutex);
  auto [it, inserted] = cache.balls.emplace(key, std::move(built));
  return *it->second;
}

int word_length(const Group& group, const GroupElement& g, int max_radius) {
  if (!group.contains(g)) mismatch();
  int lb = group.word_length_lower_bound(g);
  if (group.kind() != GroupKind::heisenberg) return lb <= max_radius ? lb : -1;
  for (int r = std::max(lb, 0); r <= max_radius; ++r) {
    const Ball& b = ball(group, r);
    // BFS order puts the outermost shell last.
    for (std::size_t i = b.size(); i-- > 0 && b.lengths[i] == r;)
      if (b.elements[i] == g) return r;
  }
  return -1;
}

}  // namespace gurevic
