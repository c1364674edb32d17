#include "gurevic/shift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "gurevic/error.hpp"

namespace gurevic {

namespace {

std::vector<int> bfs_levels(int states, const std::vector<std::vector<int>>& next, int root) {
  std::vector<int> level(states, -1);
  std::queue<int> frontier;
  level[root] = 0;
  frontier.push(root);
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int v : next[u]) {
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      }
    }
  }
  return level;
}

}  // namespace

ShiftSystem::ShiftSystem(int states, std::vector<std::uint8_t> adjacency,
                         std::vector<std::string> labels)
    : states_(states), adjacency_(std::move(adjacency)), labels_(std::move(labels)) {
  if (states_ <= 0) throw ValidationError("shift must have at least one state");
  if (adjacency_.size() != static_cast<std::size_t>(states_) * states_)
    throw ValidationError("transition matrix is not " + std::to_string(states_) + "x" +
                          std::to_string(states_));
  if (labels_.empty()) {
    for (int i = 0; i < states_; ++i) labels_.push_back(std::to_string(i + 1));
  } else if (static_cast<int>(labels_.size()) != states_) {
    throw ValidationError("label count does not match state count");
  }
  for (auto& a : adjacency_) a = a ? 1 : 0;

  successors_.assign(states_, {});
  predecessors_.assign(states_, {});
  for (int i = 0; i < states_; ++i)
    for (int j = 0; j < states_; ++j)
      if (allowed(i, j)) {
        successors_[i].push_back(j);
        predecessors_[j].push_back(i);
      }
  for (int i = 0; i < states_; ++i) {
    if (successors_[i].empty())
      throw ValidationError("dead state " + labels_[i] + ": no allowed successor");
    if (predecessors_[i].empty())
      throw ValidationError("dead state " + labels_[i] + ": no allowed predecessor");
  }
  full_ = std::all_of(adjacency_.begin(), adjacency_.end(), [](auto a) { return a != 0; });

  auto forward = bfs_levels(states_, successors_, 0);
  auto backward = bfs_levels(states_, predecessors_, 0);
  transitive_ = std::all_of(forward.begin(), forward.end(), [](int l) { return l >= 0; }) &&
                std::all_of(backward.begin(), backward.end(), [](int l) { return l >= 0; });

  std::vector<std::vector<int>> undirected(states_);
  for (int i = 0; i < states_; ++i) {
    for (int j : successors_[i]) {
      undirected[i].push_back(j);
      undirected[j].push_back(i);
    }
  }
  auto reach = bfs_levels(states_, undirected, 0);
  connected_ = std::all_of(reach.begin(), reach.end(), [](int l) { return l >= 0; });

  // Period of the strongly connected component of state 0.
  int g = 0;
  for (int u = 0; u < states_; ++u) {
    if (forward[u] < 0 || backward[u] < 0) continue;
    for (int v : successors_[u]) {
      if (forward[v] < 0 || backward[v] < 0) continue;
      g = std::gcd(g, std::abs(forward[u] + 1 - forward[v]));
    }
  }
  period_ = g == 0 ? 1 : g;
}

ShiftSystem ShiftSystem::full(int states) {
  return ShiftSystem(states, std::vector<std::uint8_t>(static_cast<std::size_t>(states) * states, 1));
}

bool ShiftSystem::allows(std::span<const int> word) const {
  for (int s : word)
    if (s < 0 || s >= states_) return false;
  for (std::size_t t = 0; t + 1 < word.size(); ++t)
    if (!allowed(word[t], word[t + 1])) return false;
  return true;
}

bool ShiftSystem::allows_periodic(std::span<const int> word) const {
  return !word.empty() && allows(word) && allowed(word.back(), word.front());
}

std::optional<int> ShiftSystem::primitivity_exponent() const {
  if (!mixing()) return std::nullopt;
  const std::size_t n = states_;
  std::vector<std::uint8_t> power = adjacency_;
  const int bound = (states_ - 1) * (states_ - 1) + 1;
  for (int k = 1; k <= bound; ++k) {
    if (std::all_of(power.begin(), power.end(), [](auto a) { return a != 0; })) return k;
    std::vector<std::uint8_t> next(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = 0; m < n; ++m) {
        if (!power[i * n + m]) continue;
        for (int j : successors_[m]) next[i * n + j] = 1;
      }
    power.swap(next);
  }
  return std::nullopt;
}

std::optional<Word> ShiftSystem::shortest_path(int from, int to) const {
  std::vector<int> parent(states_, -2);
  std::queue<int> frontier;
  for (int v : successors_[from]) {
    if (parent[v] == -2) {
      parent[v] = -1;
      frontier.push(v);
    }
  }
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    if (u == to) break;
    for (int v : successors_[u]) {
      if (parent[v] == -2) {
        parent[v] = u;
        frontier.push(v);
      }
    }
  }
  if (parent[to] == -2) return std::nullopt;
  Word path;
  for (int v = to; v != -1; v = parent[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

Potential Potential::zero(const ShiftSystem& shift) {
  return Potential(1, shift.size(),
                   std::vector<double>(static_cast<std::size_t>(shift.size()) * shift.size(), 0.0));
}

Potential Potential::per_state(const ShiftSystem& shift, std::vector<double> values) {
  const int s = shift.size();
  if (static_cast<int>(values.size()) != s)
    throw ValidationError("depth-1 potential needs one value per state");
  std::vector<double> edges(static_cast<std::size_t>(s) * s, 0.0);
  for (int i = 0; i < s; ++i) {
    if (!std::isfinite(values[i]))
      throw ValidationError("potential value for state " + shift.labels()[i] + " is not finite");
    for (int j = 0; j < s; ++j)
      if (shift.allowed(i, j)) edges[static_cast<std::size_t>(i) * s + j] = values[i];
  }
  return Potential(1, s, std::move(edges));
}

Potential Potential::per_edge(const ShiftSystem& shift, std::vector<double> values) {
  const int s = shift.size();
  if (values.size() != static_cast<std::size_t>(s) * s)
    throw ValidationError("depth-2 potential needs a states x states table");
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      double v = values[static_cast<std::size_t>(i) * s + j];
      if (!shift.allowed(i, j) && v != 0.0)
        throw ValidationError("potential value given for forbidden edge " + shift.labels()[i] +
                              "->" + shift.labels()[j]);
      if (!std::isfinite(v))
        throw ValidationError("potential value on edge " + shift.labels()[i] + "->" +
                              shift.labels()[j] + " is not finite");
    }
  return Potential(2, s, std::move(values));
}

double Potential::row_oscillation(const ShiftSystem& shift) const {
  if (depth_ == 1) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < states_; ++i) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (int j : shift.successors(i)) {
      double v = (*this)(i, j);
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

bool Potential::constant_on(const ShiftSystem& shift) const {
  std::optional<double> first;
  for (int i = 0; i < states_; ++i)
    for (int j : shift.successors(i)) {
      double v = (*this)(i, j);
      if (!first) first = v;
      if (v != *first) return false;
    }
  return true;
}

Potential Potential::operator*(double factor) const {
  std::vector<double> scaled = values_;
  for (auto& v : scaled) v *= factor;
  return Potential(depth_, states_, std::move(scaled));
}

Potential Potential::operator+(const Potential& other) const {
  if (other.states_ != states_) throw ContractError("potentials on different shifts");
  std::vector<double> sum = values_;
  for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += other.values_[k];
  return Potential(std::max(depth_, other.depth_), states_, std::move(sum));
}

double birkhoff_sum(const ShiftSystem& shift, const Potential& potential, std::span<const int> word,
                    bool periodic, std::optional<int> continuation) {
  if (word.empty()) throw ContractError("birkhoff_sum of an empty word");
  if (!shift.allows(word)) throw ContractError("word is not allowed");
  const std::size_t n = word.size();
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < n; ++t) total += potential(word[t], word[t + 1]);
  if (periodic) {
    if (!shift.allowed(word.back(), word.front()))
      throw ContractError("periodic sum requested but wrap edge is forbidden");
    return total + potential(word.back(), word.front());
  }
  if (continuation) {
    if (!shift.allowed(word.back(), *continuation))
      throw ContractError("continuation symbol cannot follow the word");
    return total + potential(word.back(), *continuation);
  }
  if (potential.depth() == 2)
    throw ContractError("open Birkhoff sum of a depth-2 potential needs a continuation symbol");
  return total + potential.state_value(word.back());
}

WordStream::WordStream(const ShiftSystem& shift, int length, Closure closure, int next,
                       std::optional<int> first, int ceiling)
    : shift_(&shift), length_(length), closure_(closure), next_(next), first_(first) {
  if (length < 1) throw ContractError("word length must be at least 1");
  if (length > ceiling)
    throw BudgetError("word length above oracle ceiling; use matrix methods",
                      static_cast<std::size_t>(length), static_cast<std::size_t>(ceiling));
  if (first && (*first < 0 || *first >= shift.size())) throw ContractError("first symbol out of range");
  if (closure == Closure::followed_by && (next < 0 || next >= shift.size()))
    throw ContractError("continuation symbol out of range");
  word_.assign(length, 0);
  choice_.assign(length, 0);
}

WordStream WordStream::periodic(const ShiftSystem& shift, int length, int ceiling) {
  return WordStream(shift, length, Closure::periodic, 0, std::nullopt, ceiling);
}

WordStream WordStream::preimages(const ShiftSystem& shift, int length, int next,
                                 std::optional<int> first, int ceiling) {
  return WordStream(shift, length, Closure::followed_by, next, first, ceiling);
}

WordStream WordStream::all(const ShiftSystem& shift, int length, std::optional<int> first,
                           int ceiling) {
  return WordStream(shift, length, Closure::open, 0, first, ceiling);
}

void WordStream::reset() {
  started_ = false;
  done_ = false;
}

bool WordStream::accept() const {
  switch (closure_) {
    case Closure::periodic:
      return shift_->allowed(word_.back(), word_.front());
    case Closure::followed_by:
      return shift_->allowed(word_.back(), next_);
    case Closure::open:
      return true;
  }
  return true;
}

// Odometer over the tree of allowed words: position 0 ranges over all states
// (or the pinned first symbol), position k over successors of position k-1.
bool WordStream::advance() {
  auto candidate = [&](int pos, std::size_t c) -> std::optional<int> {
    if (pos == 0) {
      if (first_) return c == 0 ? std::optional<int>(*first_) : std::nullopt;
      return c < static_cast<std::size_t>(shift_->size()) ? std::optional<int>(static_cast<int>(c))
                                                          : std::nullopt;
    }
    const auto& succ = shift_->successors(word_[pos - 1]);
    return c < succ.size() ? std::optional<int>(succ[c]) : std::nullopt;
  };
  auto fill_from = [&](int pos) {
    for (int p = pos; p < length_; ++p) {
      choice_[p] = 0;
      word_[p] = *candidate(p, 0);
    }
  };
  if (!started_) {
    started_ = true;
    fill_from(0);
    return true;
  }
  for (int p = length_ - 1; p >= 0; --p) {
    if (auto c = candidate(p, choice_[p] + 1)) {
      ++choice_[p];
      word_[p] = *c;
      fill_from(p + 1);
      return true;
    }
  }
  return false;
}

bool WordStream::next(Word& out) {
  if (done_) return false;
  while (advance()) {
    if (accept()) {
      out = word_;
      return true;
    }
  }
  done_ = true;
  return false;
}

std::vector<Word> enumerate_periodic(const ShiftSystem& shift, int length, const WordFilter& filter,
                                     int ceiling) {
  auto stream = WordStream::periodic(shift, length, ceiling);
  std::vector<Word> out;
  Word w;
  while (stream.next(w))
    if (!filter || filter(w)) out.push_back(w);
  return out;
}

Word BasePoint::symbols(std::size_t count) const {
  Word out;
  for (std::size_t k = 0; k < count; ++k) {
    if (k < prefix.size())
      out.push_back(prefix[k]);
    else
      out.push_back(period[(k - prefix.size()) % period.size()]);
  }
  return out;
}

void BasePoint::validate(const ShiftSystem& shift) const {
  if (period.empty()) throw ValidationError("base point needs a nonempty periodic part");
  Word head = symbols(prefix.size() + period.size() + 1);
  if (!shift.allows(head)) throw ValidationError("base point is not an allowed sequence");
}

}  // namespace gurevic
