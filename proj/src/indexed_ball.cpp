#include "gurevic/indexed_ball.hpp"

#include <algorithm>

#include "gurevic/error.hpp"

namespace gurevic {

namespace {

std::size_t letter_generator(std::int8_t letter) {
  return letter > 0 ? 2 * static_cast<std::size_t>(letter - 1)
                    : 2 * static_cast<std::size_t>(-letter - 1) + 1;
}

}  // namespace

IndexedBall::IndexedBall(const Group& group, int radius, std::size_t budget)
    : group_(group), radius_(radius), generators_(group.generators().size()) {
  if (radius < 0) throw ContractError("ball radius must be >= 0");

  if (group.kind() == GroupKind::free) {
    const std::size_t k = group.parameter();
    // |B(r)| = 1 + 2k((2k-1)^r - 1)/(2k-2), or 1 + 2r for k = 1
    long double expected = 1;
    long double shell = 2.0L * k;
    for (int r = 1; r <= radius; ++r) {
      expected += shell;
      shell *= (2.0L * k - 1);
    }
    if (expected > static_cast<long double>(budget))
      throw BudgetError("free-group ball of radius " + std::to_string(radius),
                        static_cast<std::size_t>(std::min<long double>(expected, 1e18L)), budget);
    const std::size_t total = static_cast<std::size_t>(expected);
    length_.reserve(total);
    parent_.reserve(total);
    letter_.reserve(total);
    next_.assign(total * generators_, -1);
    length_.push_back(0);
    parent_.push_back(-1);
    letter_.push_back(0);
    std::size_t begin = 0;
    for (int r = 1; r <= radius; ++r) {
      std::size_t end = length_.size();
      for (std::size_t i = begin; i < end; ++i) {
        for (int l = 1; l <= static_cast<int>(k); ++l) {
          for (int sign : {1, -1}) {
            auto letter = static_cast<std::int8_t>(sign * l);
            if (letter_[i] == -letter) continue;
            auto child = static_cast<std::int32_t>(length_.size());
            length_.push_back(r);
            parent_.push_back(static_cast<std::int32_t>(i));
            letter_.push_back(letter);
            next_[i * generators_ + letter_generator(letter)] = child;
            next_[child * generators_ + letter_generator(static_cast<std::int8_t>(-letter))] =
                static_cast<std::int32_t>(i);
          }
        }
      }
      begin = end;
    }
    inverse_.assign(length_.size(), -1);
    std::vector<std::int8_t> word;
    for (std::size_t i = 0; i < length_.size(); ++i) {
      word.clear();
      for (auto v = static_cast<std::int32_t>(i); v > 0; v = parent_[v]) word.push_back(letter_[v]);
      // word holds g's letters reversed; g^{-1} spells them negated in that order
      std::int32_t at = 0;
      for (auto l : word) at = next_[at * generators_ + letter_generator(static_cast<std::int8_t>(-l))];
      inverse_[i] = at;
    }
    return;
  }

  const Ball& source = ball(group, radius, budget);
  elements_ = source.elements;
  length_.assign(source.lengths.begin(), source.lengths.end());
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i)
    index_.emplace(elements_[i], static_cast<std::int32_t>(i));
  next_.assign(elements_.size() * generators_, -1);
  inverse_.assign(elements_.size(), -1);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    for (std::size_t s = 0; s < generators_; ++s) {
      auto it = index_.find(multiply(elements_[i], group.generators()[s]));
      if (it != index_.end()) next_[i * generators_ + s] = it->second;
    }
    if (auto it = index_.find(gurevic::inverse(elements_[i])); it != index_.end())
      inverse_[i] = it->second;
  }
}

std::size_t IndexedBall::generator_number(const GroupElement& s) const {
  for (std::size_t k = 0; k < generators_; ++k)
    if (group_.generators()[k] == s) return k;
  throw ContractError("not a generator");
}

std::int32_t IndexedBall::index_of(const GroupElement& g) const {
  if (!group_.contains(g)) throw ContractError("element not in this ball's group");
  if (group_.kind() == GroupKind::free) {
    std::int32_t at = 0;
    for (auto l : std::get<FreeWord>(g).letters) {
      at = next_[at * generators_ + letter_generator(l)];
      if (at < 0) return -1;
    }
    return at;
  }
  auto it = index_.find(g);
  return it == index_.end() ? -1 : it->second;
}

GroupElement IndexedBall::element(std::size_t index) const {
  if (group_.kind() == GroupKind::free) {
    FreeWord w{group_.parameter(), {}};
    for (auto v = static_cast<std::int32_t>(index); v > 0; v = parent_[v]) w.letters.push_back(letter_[v]);
    std::reverse(w.letters.begin(), w.letters.end());
    return w;
  }
  return elements_.at(index);
}

std::vector<std::int32_t> IndexedBall::right_multiplication(const GroupElement& h) const {
  if (!group_.contains(h)) throw ContractError("element not in this ball's group");
  std::vector<std::int32_t> table(size(), -1);
  if (group_.kind() == GroupKind::free) {
    // letter by letter: intermediate lengths never exceed max(|g|, |gh|)
    const auto& letters = std::get<FreeWord>(h).letters;
    for (std::size_t i = 0; i < size(); ++i) {
      std::int32_t at = static_cast<std::int32_t>(i);
      for (auto l : letters) {
        at = next_[at * generators_ + letter_generator(l)];
        if (at < 0) break;
      }
      table[i] = at;
    }
    return table;
  }
  for (std::size_t i = 0; i < size(); ++i) {
    auto it = index_.find(multiply(elements_[i], h));
    if (it != index_.end()) table[i] = it->second;
  }
  return table;
}

}  // namespace gurevic
