#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gurevic {

// States are 0-based internally; configs and reports use 1-based labels.
using Word = std::vector<int>;

inline constexpr int kDefaultOracleCeiling = 20;

// Finite topological Markov shift given by a 0/1 transition matrix.
class ShiftSystem {
 public:
  // adjacency is row-major, states*states, nonzero meaning "allowed".
  // Throws ValidationError for dead states (no successor or no predecessor).
  ShiftSystem(int states, std::vector<std::uint8_t> adjacency,
              std::vector<std::string> labels = {});

  static ShiftSystem full(int states);

  int size() const noexcept { return states_; }
  bool allowed(int from, int to) const noexcept {
    return adjacency_[static_cast<std::size_t>(from) * states_ + to] != 0;
  }
  std::span<const std::uint8_t> adjacency() const noexcept { return adjacency_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<int>& successors(int state) const { return successors_.at(state); }
  const std::vector<int>& predecessors(int state) const { return predecessors_.at(state); }

  bool transitive() const noexcept { return transitive_; }
  bool mixing() const noexcept { return transitive_ && period_ == 1; }
  // gcd of cycle lengths through state 0's strongly connected component.
  int period() const noexcept { return period_; }
  bool full_shift() const noexcept { return full_; }
  // Underlying undirected graph connected.
  bool connected() const noexcept { return connected_; }

  bool allows(std::span<const int> word) const;
  // Allowed and the wrap edge (last -> first) is allowed too.
  bool allows_periodic(std::span<const int> word) const;

  // Smallest N with every entry of A^N positive, searched up to the Wielandt
  // bound (S-1)^2+1. Empty when the system is not mixing.
  std::optional<int> primitivity_exponent() const;

  // Shortest state path from -> ... -> to, excluding `from`, including `to`.
  // Empty optional if unreachable.
  std::optional<Word> shortest_path(int from, int to) const;

 private:
  int states_;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> successors_;
  std::vector<std::vector<int>> predecessors_;
  bool transitive_ = false;
  bool connected_ = false;
  bool full_ = false;
  int period_ = 1;
};

// Locally constant potential depending on at most two coordinates. A depth-1
// potential is stored expanded on edges, constant in the second coordinate.
class Potential {
 public:
  static Potential zero(const ShiftSystem& shift);
  static Potential per_state(const ShiftSystem& shift, std::vector<double> values);
  // values row-major states*states; entries on forbidden edges must be zero.
  static Potential per_edge(const ShiftSystem& shift, std::vector<double> values);

  int depth() const noexcept { return depth_; }
  int states() const noexcept { return states_; }
  double operator()(int from, int to) const noexcept {
    return values_[static_cast<std::size_t>(from) * states_ + to];
  }
  // Meaningful for depth 1 only.
  double state_value(int state) const noexcept { return (*this)(state, 0); }
  std::span<const double> edge_values() const noexcept { return values_; }

  // max over rows i of (max_j phi(i,j) - min_j phi(i,j)) on allowed edges.
  // Zero for depth-1 potentials.
  double row_oscillation(const ShiftSystem& shift) const;
  bool constant_on(const ShiftSystem& shift) const;

  Potential operator*(double factor) const;
  Potential operator+(const Potential& other) const;

 private:
  Potential(int depth, int states, std::vector<double> values)
      : depth_(depth), states_(states), values_(std::move(values)) {}

  int depth_;
  int states_;
  std::vector<double> values_;
};

// phi^n along w. Periodic sums use the wrap edge (w_n, w_1). Open sums of a
// depth-2 potential need the symbol that follows w.
double birkhoff_sum(const ShiftSystem& shift, const Potential& potential, std::span<const int> word,
                    bool periodic, std::optional<int> continuation = std::nullopt);

// Restartable lexicographic stream of allowed words of a fixed length.
class WordStream {
 public:
  // Words with A(w_n, w_1) = 1, i.e. periodic points of period n.
  static WordStream periodic(const ShiftSystem& shift, int length,
                             int ceiling = kDefaultOracleCeiling);
  // Words w with A(w_n, next) = 1, i.e. the first n symbols of preimages of a
  // point starting with `next`. `first` optionally pins w_1.
  static WordStream preimages(const ShiftSystem& shift, int length, int next,
                              std::optional<int> first = std::nullopt,
                              int ceiling = kDefaultOracleCeiling);
  // Every allowed word, optionally with w_1 pinned.
  static WordStream all(const ShiftSystem& shift, int length, std::optional<int> first = std::nullopt,
                        int ceiling = kDefaultOracleCeiling);

  bool next(Word& out);
  void reset();

 private:
  enum class Closure { periodic, followed_by, open };
  WordStream(const ShiftSystem& shift, int length, Closure closure, int next,
             std::optional<int> first, int ceiling);
  bool accept() const;
  bool advance();

  const ShiftSystem* shift_;
  int length_;
  Closure closure_;
  int next_;
  std::optional<int> first_;
  Word word_;
  std::vector<std::size_t> choice_;
  bool started_ = false;
  bool done_ = false;
};

// Eventually periodic point o = prefix (period)^infinity.
struct BasePoint {
  Word prefix;
  Word period;

  int first() const { return prefix.empty() ? period.front() : prefix.front(); }
  // First `count` symbols of o.
  Word symbols(std::size_t count) const;
  void validate(const ShiftSystem& shift) const;
};

using WordFilter = std::function<bool(std::span<const int>)>;

std::vector<Word> enumerate_periodic(const ShiftSystem& shift, int length,
                                     const WordFilter& filter = {},
                                     int ceiling = kDefaultOracleCeiling);

}  // namespace gurevic
