#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support.hpp"
#include "generators.hpp"
#include "gurevic/error.hpp"
#include "gurevic/oracle.hpp"
#include "gurevic/transfer.hpp"

using namespace gurevic;

namespace {

ShiftSystem golden() { return ShiftSystem(2, {1, 1, 1, 0}); }

const LatticeValues kParity{{1}, {-1}};

}  // namespace

TEST_CASE("build operator") {
  auto full = ShiftSystem::full(2);
  auto zero = Potential::zero(full);
  const std::vector<double> w{0.0};
  auto m = build_operator(full, zero, kParity, w, std::vector<double>{0.0});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(m.entries(i, j) == std::complex<double>(1.0, 0.0));

  auto q = build_operator(full, zero, kParity, w, std::vector<double>{0.25});
  CHECK(std::abs(q.entries(0, 1) - std::complex<double>(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(q.entries(1, 0) - std::complex<double>(0.0, -1.0)) < 1e-15);
  CHECK(twisted_spectral_radius(full, zero, kParity, w, std::vector<double>{0.25}) < 1e-12);

  auto g = golden();
  auto a = build_operator(g, Potential::zero(g), no_displacement(2), {}, {});
  CHECK(a.entries(1, 1) == std::complex<double>(0.0, 0.0));
  CHECK(a.entries(0, 1) == std::complex<double>(1.0, 0.0));

  CHECK_THROWS_AS(build_operator(full, zero, kParity, std::vector<double>{0.0, 1.0}, std::vector<double>{0.0}),
                  ContractError);
}

TEST_CASE("perron examples") {
  auto g = golden();
  auto scaled = real_operator(g, Potential::zero(g));
  auto pd = perron(g, scaled.matrix);
  CHECK(std::abs(pd.lambda - std::numbers::phi) < 1e-10);
  CHECK(pd.right.maxCoeff() == doctest::Approx(1.0));
  CHECK(pd.left.dot(pd.right) == doctest::Approx(1.0));
  REQUIRE(pd.second_modulus);
  CHECK(*pd.second_modulus < pd.lambda);

  auto full = ShiftSystem::full(2);
  auto phi = Potential::per_state(full, {std::log(3.0), 0.0});
  auto mu = gibbs(full, phi);
  CHECK(std::exp(mu.pressure) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(mu.stationary[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(mu.stationary[1] == doctest::Approx(0.25).epsilon(1e-12));

  auto one = ShiftSystem::full(1);
  auto c = Potential::per_state(one, {0.7});
  CHECK(pressure(one, c) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("dense and power iteration agree") {
  gen::Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 2, 12), 0.5);
    if (!s.mixing()) continue;
    auto phi = gen::potential(rng, s, 2);
    auto m = real_operator(s, phi);
    auto dense = perron(s, m.matrix, 1e-13, PerronMethod::dense);
    auto power = perron(s, m.matrix, 1e-13, PerronMethod::power);
    CHECK(dense.lambda == doctest::Approx(power.lambda).epsilon(1e-9));
    for (int i = 0; i < s.size(); ++i) {
      CHECK(std::abs(dense.right[i] - power.right[i]) < 1e-8);
      CHECK(std::abs(dense.left[i] - power.left[i]) < 1e-8);
    }
  }
}

TEST_CASE("pressure examples") {
  CHECK(std::abs(pressure(golden(), Potential::zero(golden())) - 0.4812118251) < 1e-9);
  auto full = ShiftSystem::full(2);
  CHECK(pressure(full, Potential::zero(full)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  auto tilted = Potential::per_state(full, {1.0, 0.0});
  const std::vector<double> w{-0.5};
  CHECK(std::abs(pressure(full, tilted, kParity, w) - 1.1931471806) < 1e-10);
}

TEST_CASE("pressure via periodic points") {
  auto g = golden();
  auto seq = pressure_via_periodic(g, Potential::zero(g), 10);
  CHECK(seq[9].second == doctest::Approx(std::log(123.0) / 10.0).epsilon(1e-12));
  auto full = ShiftSystem::full(2);
  for (auto [n, v] : pressure_via_periodic(full, Potential::zero(full), 30)) {
    CAPTURE(n);
    CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  }
  ShiftSystem cycle(2, {0, 1, 1, 0});
  auto c = pressure_via_periodic(cycle, Potential::zero(cycle), 4);
  CHECK(c[2].second == kMinusInfinity);
  CHECK(c[3].second == doctest::Approx(std::log(2.0) / 4.0));
}

TEST_CASE("cylinder masses") {
  auto full = ShiftSystem::full(2);
  auto bern = gibbs(full, Potential::zero(full));
  CHECK(cylinder_mass(bern, full, std::vector<int>{0, 0}).mass == doctest::Approx(0.25));
  auto biased = gibbs(full, Potential::per_state(full, {std::log(3.0), 0.0}));
  CHECK(cylinder_mass(biased, full, std::vector<int>{0}).mass == doctest::Approx(0.75));
  auto g = golden();
  auto gm = gibbs(g, Potential::zero(g));
  auto forbidden = cylinder_mass(gm, g, std::vector<int>{1, 1});
  CHECK(forbidden.mass == 0.0);
  CHECK_FALSE(forbidden.allowed);
}

TEST_CASE("Gibbs bounds examples") {
  auto full = ShiftSystem::full(2);
  auto zero = Potential::zero(full);
  auto b = gibbs_bounds_check(gibbs(full, zero), full, zero, 6);
  CHECK(b.a_emp == 1.0);
  CHECK(b.b_emp == 1.0);

  auto g = golden();
  auto gz = Potential::zero(g);
  auto gb = gibbs_bounds_check(gibbs(g, gz), g, gz, 6);
  CHECK(gb.a_emp > 0.2);
  CHECK(gb.b_emp < 2.0);
  CHECK(gb.a_emp >= gb.envelope_low * (1 - 1e-12));
  CHECK(gb.b_emp <= gb.envelope_high * (1 + 1e-12));

  auto one = ShiftSystem::full(1);
  auto c = Potential::per_state(one, {-0.3});
  auto ob = gibbs_bounds_check(gibbs(one, c), one, c, 6);
  CHECK(ob.a_emp == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ob.b_emp == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("twisted spectral radius closed form") {
  auto full = ShiftSystem::full(2);
  auto zero = Potential::zero(full);
  const std::vector<double> w{0.0};
  CHECK(std::abs(twisted_spectral_radius(full, zero, kParity, w, std::vector<double>{0.125}) - std::sqrt(2.0)) <
        1e-10);
  CHECK(twisted_spectral_radius(full, zero, kParity, w, std::vector<double>{0.0}) == doctest::Approx(2.0));
}

TEST_CASE("property: twisted entries change phase only") {
  gen::Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 5), 0.6);
    auto phi = gen::potential(rng, s, 2);
    LatticeValues f(s.size(), std::vector<std::int64_t>(2));
    for (auto& v : f)
      for (auto& x : v) x = gen::uniform_int(rng, -2, 2);
    std::vector<double> w{gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1)};
    std::vector<double> t{gen::uniform(rng, 0, 1), gen::uniform(rng, 0, 1)};
    auto twisted = build_operator(s, phi, f, w, t);
    auto plain = build_operator(s, phi, f, w, std::vector<double>{0.0, 0.0});
    for (int i = 0; i < s.size(); ++i)
      for (int j = 0; j < s.size(); ++j) {
        if (!s.allowed(i, j)) {
          CHECK(twisted.entries(i, j) == std::complex<double>(0.0, 0.0));
          continue;
        }
        CHECK(std::abs(twisted.entries(i, j)) == doctest::Approx(std::abs(plain.entries(i, j))).epsilon(1e-14));
      }
  }
}

TEST_CASE("property: trace(M^n) equals the periodic sum") {
  gen::Rng rng(43);
  for (int trial = 0; trial < 25; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 4), 0.6);
    auto phi = gen::potential(rng, s, gen::uniform_int(rng, 1, 2), 0.5);
    LatticeValues f(s.size(), std::vector<std::int64_t>(1));
    for (auto& v : f) v[0] = gen::uniform_int(rng, -2, 2);
    std::vector<double> w{gen::uniform(rng, -0.5, 0.5)};
    std::vector<double> t{gen::uniform(rng, 0, 1)};
    auto traces = trace_powers(build_operator(s, phi, f, w, t), 9);
    for (int n = 1; n <= 9; ++n) {
      auto brute = oracle::twisted_periodic_sum(s, phi, f, w, t, n);
      CAPTURE(trial);
      CAPTURE(n);
      CHECK(std::abs(traces[n - 1] - brute) <= 1e-9 * std::max(1.0, std::abs(brute)));
    }
  }
}

TEST_CASE("property: pressure is monotone in the potential") {
  gen::Rng rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 6), 0.5);
    auto phi = gen::potential(rng, s, 2);
    auto bump = gen::potential(rng, s, 2);
    std::vector<double> v(bump.edge_values().begin(), bump.edge_values().end());
    for (auto& x : v) x = std::abs(x);
    auto larger = phi + Potential::per_edge(s, v);
    CHECK(pressure(s, phi) <= pressure(s, larger) + 1e-12);
  }
}

TEST_CASE("property: Gibbs measures are stationary and consistent") {
  gen::Rng rng(45);
  for (int trial = 0; trial < 25; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 5), 0.6);
    auto phi = gen::potential(rng, s, 2);
    auto mu = gibbs(s, phi);
    const int k = s.size();
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      total += mu.stationary[i];
      double row = 0.0, into = 0.0;
      for (int j = 0; j < k; ++j) {
        row += mu.kernel(i, j);
        into += mu.stationary[j] * mu.kernel(j, i);
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(into == doctest::Approx(mu.stationary[i]).epsilon(1e-10));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    // Kolmogorov: mass of [w] equals the sum over one-symbol extensions
    for (int n = 1; n <= 4; ++n) {
      Word w = gen::allowed_word(rng, s, n);
      double parent = cylinder_mass(mu, s, w).mass;
      double children = 0.0;
      for (int c : s.successors(w.back())) {
        Word longer = w;
        longer.push_back(c);
        children += cylinder_mass(mu, s, longer).mass;
      }
      CHECK(children == doctest::Approx(parent).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: twisted radius is bounded by e^P") {
  gen::Rng rng(46);
  for (int trial = 0; trial < 15; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 2, 5), 0.7);
    if (!s.mixing()) continue;
    auto phi = gen::potential(rng, s, 2, 0.5);
    LatticeValues f(s.size(), std::vector<std::int64_t>(1));
    for (auto& v : f) v[0] = gen::uniform_int(rng, -1, 1);
    // |M(t)| <= M entrywise, so the radius never exceeds lambda
    const double bound = std::exp(pressure(s, phi, f, std::vector<double>{0.0}));
    for (int k = 1; k < 16; ++k) {
      double r = twisted_spectral_radius(s, phi, f, std::vector<double>{0.0}, std::vector<double>{k / 16.0});
      CHECK(r <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("Bernoulli closed form matches the dense path") {
  gen::Rng rng(47);
  for (int states : {1, 2, 5, 40}) {
    auto s = ShiftSystem::full(states);
    auto phi = gen::potential(rng, s, 1);
    LatticeValues f(states, std::vector<std::int64_t>(1));
    for (auto& v : f) v[0] = gen::uniform_int(rng, -3, 3);
    std::vector<double> w{gen::uniform(rng, -0.4, 0.4)};
    auto lw = bernoulli_log_weights(s, phi, f, w);
    REQUIRE(lw);
    double closed = pressure(s, phi, f, w);
    auto m = real_operator(s, phi, f, w);
    double dense = std::log(perron(s, m.matrix, 1e-13, PerronMethod::dense).lambda) + m.offset;
    CHECK(closed == doctest::Approx(dense).epsilon(1e-11));
  }
  auto g = golden();
  CHECK_FALSE(bernoulli_log_weights(g, Potential::zero(g)));
  auto full = ShiftSystem::full(2);
  CHECK_FALSE(bernoulli_log_weights(full, Potential::per_edge(full, {0.0, 1.0, 0.0, 0.0})));
}
