#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>

#include "../support.hpp"
#include "generators.hpp"
#include "gurevic/config.hpp"
#include "gurevic/error.hpp"
#include "gurevic/shift.hpp"

using namespace gurevic;

namespace {

const char* kGolden = R"(
# golden mean
[shift]
states = 2
edges = 1->1, 1->2, 2->1
[potential]
depth = 1
)";

long long trace_power(const ShiftSystem& s, int n) {
  const int k = s.size();
  Eigen::MatrixX<long long> a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = s.allowed(i, j);
  Eigen::MatrixX<long long> p = Eigen::MatrixX<long long>::Identity(k, k);
  for (int t = 0; t < n; ++t) p = p * a;
  return p.trace();
}

}  // namespace

TEST_CASE("parse golden mean") {
  auto c = parse_system(kGolden);
  CHECK(c.shift.size() == 2);
  CHECK(c.shift.mixing());
  CHECK(c.shift.period() == 1);
  CHECK_FALSE(c.shift.allowed(1, 1));
}

TEST_CASE("two-cycle is transitive with period 2") {
  auto c = parse_system("[shift]\nmatrix = 0 1; 1 0\n");
  CHECK(c.shift.transitive());
  CHECK_FALSE(c.shift.mixing());
  CHECK(c.shift.period() == 2);
}

TEST_CASE("config errors") {
  SUBCASE("potential on a forbidden edge") {
    CHECK_THROWS_AS(parse_system("[shift]\nstates = 2\nedges = 1->1, 1->2, 2->1\n[potential]\nphi 2 2 = 1\n"),
                    ValidationError);
  }
  SUBCASE("dead state names the state") {
    try {
      parse_system("[shift]\nstates = 2\nedges = 1->1, 1->2\n");
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
  }
  SUBCASE("parse error carries a line") {
    try {
      parse_system("[shift]\nstates = 2\nfull = true\n[potential]\nphi 1 = abc\n");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 5);
    }
  }
  SUBCASE("non-square matrix") {
    CHECK_THROWS_AS(parse_system("[shift]\nmatrix = 1 1; 1\n"), ValidationError);
  }
  SUBCASE("unknown group") {
    CHECK_THROWS_AS(parse_system("[shift]\nstates = 1\nfull = true\n[cocycle]\ngroup = sl 2\n"),
                    ValidationError);
  }
  SUBCASE("disconnected system") {
    CHECK_THROWS_AS(parse_system("[shift]\nstates = 2\nedges = 1->1, 2->2\n"), ValidationError);
  }
}

TEST_CASE("every demo config parses") {
  for (const char* name : {"golden_mean.cfg", "golden_mean_depth2.cfg", "full2_parity.cfg",
                           "full2_tilted.cfg", "full3_z.cfg", "free2.cfg", "heisenberg.cfg", "zeta.cfg"}) {
    CAPTURE(name);
    CHECK_NOTHROW(gurevic::testing::load_config(name));
  }
}

TEST_CASE("birkhoff sums") {
  auto golden = parse_system(kGolden);
  Word w{0, 1, 0};
  CHECK(birkhoff_sum(golden.shift, golden.potential, w, true) == 0.0);

  auto full = ShiftSystem::full(2);
  auto depth1 = Potential::per_state(full, {1.0, 0.0});
  Word w2{0, 0, 1};
  CHECK(birkhoff_sum(full, depth1, w2, true) == 2.0);

  auto depth2 = Potential::per_edge(full, {1.0, 0.0, 0.0, 0.0});
  Word w3{0, 0, 0};
  CHECK(birkhoff_sum(full, depth2, w3, true) == 3.0);

  Word bad{1, 1};
  CHECK_THROWS_AS(birkhoff_sum(golden.shift, golden.potential, bad, true), ContractError);
  Word open{0, 1};
  CHECK_THROWS_AS(birkhoff_sum(full, depth2, open, false), ContractError);
}

TEST_CASE("periodic enumeration") {
  auto golden = parse_system(kGolden);
  CHECK(enumerate_periodic(golden.shift, 1).size() == 1);
  CHECK(enumerate_periodic(golden.shift, 4).size() == 7);
  CHECK(enumerate_periodic(ShiftSystem::full(2), 3).size() == 8);
  CHECK_THROWS_AS(enumerate_periodic(golden.shift, 21), BudgetError);

  auto words = enumerate_periodic(golden.shift, 6);
  CHECK(std::is_sorted(words.begin(), words.end()));
  CHECK(std::adjacent_find(words.begin(), words.end()) == words.end());

  auto stream = WordStream::periodic(golden.shift, 5);
  Word w;
  int first = 0, second = 0;
  while (stream.next(w)) ++first;
  stream.reset();
  while (stream.next(w)) ++second;
  CHECK(first == second);
}

TEST_CASE("property: periodic count equals trace(A^n)") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 4), 0.5, false);
    for (int n = 1; n <= 8; ++n) {
      CAPTURE(trial);
      CAPTURE(n);
      CHECK(static_cast<long long>(enumerate_periodic(s, n).size()) == trace_power(s, n));
    }
  }
}

TEST_CASE("property: mixing flag agrees with primitivity") {
  gen::Rng rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 5), 0.35);
    const int k = s.size();
    bool positive_power = false;
    Eigen::MatrixXd a(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = s.allowed(i, j);
    Eigen::MatrixXd p = a;
    for (int n = 1; n <= k * k && !positive_power; ++n, p = (p * a).cwiseMin(1.0))
      positive_power = (p.array() > 0.0).all();
    CAPTURE(trial);
    CHECK(s.mixing() == positive_power);
    CHECK(s.primitivity_exponent().has_value() == s.mixing());
    // the period divides every cycle length
    for (int n = 1; n <= 2 * k; ++n)
      if (trace_power(s, n) > 0) CHECK(n % s.period() == 0);
  }
}

TEST_CASE("property: periodic Birkhoff sums are rotation invariant") {
  gen::Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 4), 0.6);
    auto phi = gen::potential(rng, s, 2);
    int n = gen::uniform_int(rng, 1, 8);
    auto words = enumerate_periodic(s, n);
    if (words.empty()) continue;
    Word w = words[gen::uniform_int(rng, 0, static_cast<int>(words.size()) - 1)];
    double base = birkhoff_sum(s, phi, w, true);
    for (int r = 1; r < n; ++r) {
      Word rotated(w);
      std::rotate(rotated.begin(), rotated.begin() + r, rotated.end());
      CHECK(birkhoff_sum(s, phi, rotated, true) == doctest::Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: depth-2 potentials have zero variation on cylinders") {
  gen::Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 2, 5), 0.6);
    auto phi = gen::potential(rng, s, 2);
    int n = gen::uniform_int(rng, 1, 7);
    Word u = gen::allowed_word(rng, s, n + 1);
    // two continuations beyond the (n+1)-prefix leave phi^n unchanged
    Word head(u.begin(), u.begin() + n);
    for (int c : s.successors(u.back())) {
      Word longer = u;
      longer.push_back(c);
      Word first_n(longer.begin(), longer.begin() + n);
      CHECK(birkhoff_sum(s, phi, first_n, false, longer[n]) == birkhoff_sum(s, phi, head, false, u[n]));
    }
  }
}

TEST_CASE("depth-1 potentials are constant in the second coordinate") {
  gen::Rng rng(15);
  auto s = gen::shift(rng, 4, 0.7);
  auto phi = gen::potential(rng, s, 1);
  for (int i = 0; i < 4; ++i)
    for (int j : s.successors(i)) CHECK(phi(i, j) == phi.state_value(i));
  CHECK(phi.row_oscillation(s) == 0.0);
}

TEST_CASE("base points") {
  BasePoint o{{0}, {1, 0}};
  CHECK(o.first() == 0);
  CHECK(o.symbols(5) == Word{0, 1, 0, 1, 0});
  auto golden = parse_system(kGolden);
  BasePoint bad{{}, {1}};
  CHECK_THROWS(bad.validate(golden.shift));
}
