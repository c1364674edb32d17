#include <doctest.h>

#include <functional>
#include <set>

#include "generators.hpp"
#include "gurevic/error.hpp"
#include "gurevic/group.hpp"
#include "gurevic/indexed_ball.hpp"
#include "gurevic/oracle.hpp"

using namespace gurevic;

namespace {

FreeWord fw(std::initializer_list<int> letters) {
  FreeWord w{2, {}};
  for (int l : letters) w.letters.push_back(static_cast<std::int8_t>(l));
  return w;
}

// reduce by repeatedly deleting one adjacent inverse pair
std::vector<int> slow_reduce(std::vector<int> w) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
      if (w[k] == -w[k + 1]) {
        w.erase(w.begin() + k, w.begin() + k + 2);
        changed = true;
        break;
      }
  }
  return w;
}

}  // namespace

TEST_CASE("group operations") {
  auto f2 = Group::free(2);
  CHECK(is_identity(multiply(fw({1}), fw({-1}))));

  HeisenbergElement x{1, 0, 0}, y{0, 1, 0};
  CHECK(multiply(x, y) == GroupElement{HeisenbergElement{1, 1, 1}});
  CHECK(multiply(y, x) == GroupElement{HeisenbergElement{1, 1, 0}});

  auto sum = multiply(LatticeElement{{3, -1}}, LatticeElement{{-3, 1}});
  CHECK(is_identity(sum));

  CHECK_THROWS_AS(multiply(LatticeElement{{1}}, HeisenbergElement{}), ContractError);
  CHECK_THROWS_AS(multiply(LatticeElement{{1}}, LatticeElement{{1, 2}}), ContractError);
  CHECK(inverse(HeisenbergElement{2, 3, 5}) == GroupElement{HeisenbergElement{-2, -3, 6 - 5}});
  (void)f2;
}

TEST_CASE("cocycle products") {
  auto full4 = ShiftSystem::full(4);
  auto f2 = Group::free(2);
  Cocycle free_psi{f2, {f2.parse("g1"), f2.parse("g1^-1"), f2.parse("g2"), f2.parse("g2^-1")}};
  Word w{0, 1, 2, 3};
  CHECK(is_identity(cocycle_product(free_psi, full4, w, true)));

  auto h = Group::heisenberg();
  Cocycle h_psi{h, {h.parse("x"), h.parse("x^-1"), h.parse("y"), h.parse("y^-1")}};
  Word commutator{0, 2, 1, 3};
  CHECK(cocycle_product(h_psi, full4, commutator, true) == GroupElement{HeisenbergElement{0, 0, 1}});

  auto trivial = Cocycle::trivial(4);
  CHECK(is_identity(cocycle_product(trivial, full4, commutator, false)));
}

TEST_CASE("balls") {
  CHECK(ball(Group::lattice(1), 2).size() == 5);
  CHECK(ball(Group::free(2), 2).size() == 17);
  auto h = Group::heisenberg();
  const auto& b = ball(h, 2);
  std::set<std::tuple<long, long, long>> elements;
  for (const auto& g : b.elements) {
    auto e = std::get<HeisenbergElement>(g);
    elements.insert({e.a, e.b, e.c});
  }
  CHECK(elements.count({0, 0, 0}) == 1);
  CHECK(elements.count({1, 1, 1}) == 1);
  CHECK(elements.count({1, 0, 0}) == 1);
  CHECK(elements.count({0, -1, 0}) == 1);
  for (auto group : gen::groups())
    for (int r = 0; r <= 4; ++r) {
      CAPTURE(group.name());
      CAPTURE(r);
      CHECK(ball(group, r).size() == oracle::ball_size(group, r));
    }
  CHECK_THROWS_AS(ball(Group::free(3), 30, 1000), BudgetError);
}

TEST_CASE("indexed balls match plain balls") {
  for (auto group : gen::groups()) {
    IndexedBall ib(group, 5);
    const auto& b = ball(group, 5);
    REQUIRE(ib.size() == b.size());
    CHECK(is_identity(ib.element(0)));
    for (std::size_t k = 0; k < ib.size(); ++k) {
      auto g = ib.element(k);
      CHECK(ib.index_of(g) == static_cast<std::int32_t>(k));
      CHECK(ib.length(k) == word_length(group, g, 5));
      CHECK(ib.element(ib.inverse(k)) == inverse(g));
    }
    for (const auto& s : group.generators()) {
      auto right = ib.right_multiplication(s);
      for (std::size_t k = 0; k < ib.size(); ++k) {
        auto prod = multiply(ib.element(k), s);
        if (right[k] >= 0)
          CHECK(ib.element(right[k]) == prod);
        else
          CHECK(word_length(group, prod, 6) == 6);
      }
    }
  }
}

TEST_CASE("abelianization") {
  AbelianizationMap z2(Group::lattice(2));
  CHECK(z2.rank() == 2);
  AbelianizationMap f3(Group::free(3));
  CHECK(f3.rank() == 3);
  CHECK(f3.apply(Group::free(3).parse("g1 g2 g1 g3^-1")) == std::vector<std::int64_t>{2, 1, -1});
  AbelianizationMap h(Group::heisenberg());
  CHECK(h.apply(HeisenbergElement{2, -1, 7}) == std::vector<std::int64_t>{2, -1});
  AbelianizationMap c(Group::cyclic(5));
  CHECK(c.rank() == 0);
}

TEST_CASE("property: abelianization is a homomorphism") {
  gen::Rng rng(21);
  for (auto group : gen::groups()) {
    AbelianizationMap pi(group);
    CHECK(pi.apply(group.identity()) == std::vector<std::int64_t>(pi.rank(), 0));
    for (int k = 0; k < 1000; ++k) {
      auto g = gen::element(rng, group, gen::uniform_int(rng, 0, 8));
      auto h = gen::element(rng, group, gen::uniform_int(rng, 0, 8));
      auto lhs = pi.apply(multiply(g, h));
      auto a = pi.apply(g), b = pi.apply(h);
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
      REQUIRE(lhs == a);
    }
  }
}

TEST_CASE("property: free reduction is minimal") {
  // every word of length <= 6 over F2
  const std::vector<int> letters{1, -1, 2, -2};
  std::function<void(std::vector<int>&)> walk = [&](std::vector<int>& w) {
    GroupElement g = FreeWord{2, {}};
    for (int l : w) g = multiply(g, GroupElement{FreeWord{2, {static_cast<std::int8_t>(l)}}});
    auto reduced = slow_reduce(w);
    const auto& got = std::get<FreeWord>(g).letters;
    REQUIRE(std::vector<int>(got.begin(), got.end()) == reduced);
    // idempotent: multiplying the reduced word by e changes nothing
    CHECK(multiply(g, Group::free(2).identity()) == g);
    if (w.size() == 6) return;
    for (int l : letters) {
      w.push_back(l);
      walk(w);
      w.pop_back();
    }
  };
  std::vector<int> w;
  walk(w);
}

TEST_CASE("property: Heisenberg associativity on the radius-2 ball") {
  const auto& b = ball(Group::heisenberg(), 2);
  for (const auto& x : b.elements)
    for (const auto& y : b.elements)
      for (const auto& z : b.elements) REQUIRE(multiply(multiply(x, y), z) == multiply(x, multiply(y, z)));
}

TEST_CASE("property: word length is inversion invariant") {
  gen::Rng rng(22);
  for (auto group : gen::groups())
    for (int k = 0; k < 200; ++k) {
      auto g = gen::element(rng, group, gen::uniform_int(rng, 0, 6));
      CHECK(word_length(group, g, 8) == word_length(group, inverse(g), 8));
      CHECK(group.word_length_lower_bound(g) <= word_length(group, g, 8));
    }
}

TEST_CASE("parse and format round trip") {
  auto h = Group::heisenberg();
  auto g = h.parse("x y x^-1 y^-1");
  CHECK(g == GroupElement{HeisenbergElement{0, 0, 1}});
  CHECK(h.parse(h.format(g)) == g);
  auto z = Group::lattice(2);
  CHECK(z.parse("3,-1") == GroupElement{LatticeElement{{3, -1}}});
  CHECK(is_identity(z.parse("e")));
  CHECK_THROWS(h.parse("q"));

  gen::Rng rng(23);
  for (auto group : gen::groups())
    for (int k = 0; k < 100; ++k) {
      auto x = gen::element(rng, group, gen::uniform_int(rng, 0, 6));
      CAPTURE(group.format(x));
      CHECK(group.parse(group.format(x)) == x);
    }
}
