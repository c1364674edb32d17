#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gurevic/group.hpp"

namespace gurevic {

// Word-length ball with every element given a dense index (identity = 0,
// BFS order) and a generator neighbour table, so DP layers can be plain
// arrays. Free-group balls are trees and are stored by parent links only.
class IndexedBall {
 public:
  IndexedBall(const Group& group, int radius, std::size_t budget = kDefaultEntryBudget);

  const Group& group() const noexcept { return group_; }
  int radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return length_.size(); }
  int length(std::size_t index) const noexcept { return length_[index]; }
  const std::vector<std::int32_t>& lengths() const noexcept { return length_; }
  // Index of g*s for generator number s, or -1 outside the ball.
  std::int32_t neighbor(std::size_t index, std::size_t generator) const noexcept {
    return next_[index * generators_ + generator];
  }
  std::int32_t inverse(std::size_t index) const noexcept { return inverse_[index]; }
  const std::vector<std::int32_t>& inverses() const noexcept { return inverse_; }

  std::int32_t index_of(const GroupElement& g) const;
  GroupElement element(std::size_t index) const;

  // For every index g, the index of g*h, or -1 when g*h leaves the ball.
  std::vector<std::int32_t> right_multiplication(const GroupElement& h) const;

 private:
  std::size_t generator_number(const GroupElement& s) const;

  Group group_;
  int radius_;
  std::size_t generators_;
  std::vector<std::int32_t> length_;
  std::vector<std::int32_t> next_;
  std::vector<std::int32_t> inverse_;
  // free groups
  std::vector<std::int32_t> parent_;
  std::vector<std::int8_t> letter_;
  // other groups
  std::vector<GroupElement> elements_;
  std::unordered_map<GroupElement, std::int32_t> index_;
};

}  // namespace gurevic
