#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support.hpp"
#include "generators.hpp"
#include "gurevic/error.hpp"
#include "gurevic/oracle.hpp"
#include "gurevic/skewprod.hpp"
#include "gurevic/xi.hpp"

using namespace gurevic;
using gurevic::testing::load_skew;
using gurevic::testing::make_skew;
using gurevic::testing::z1;

namespace {

const double kLog4 = std::log(4.0);

SkewSystem parity() { return load_skew("full2_parity.cfg"); }

// Random mode valid for the system: periodic modes always, preimage modes
// with o = (some periodic word)^infinity.
ConstraintMode random_mode(gen::Rng& rng, const SkewSystem& sys, int kind, bool target) {
  const auto& s = sys.shift();
  int a = gen::uniform_int(rng, 0, s.size() - 1);
  std::optional<GroupElement> t;
  if (target) t = gen::element(rng, sys.group(), gen::uniform_int(rng, 0, 2));
  BasePoint o;
  for (int len = 1; o.period.empty(); ++len) {
    auto words = enumerate_periodic(s, len);
    if (!words.empty()) o.period = words[gen::uniform_int(rng, 0, static_cast<int>(words.size()) - 1)];
  }
  switch (kind) {
    case 0:
      return ConstraintMode::periodic_all(t);
    case 1:
      return ConstraintMode::periodic_cylinder(a, t);
    case 2:
      return ConstraintMode::preimage(o, t);
    default: {
      // the cylinder must reach o_1 in one step
      const auto& pred = s.predecessors(o.first());
      return ConstraintMode::preimage_cylinder(pred[gen::uniform_int(rng, 0, static_cast<int>(pred.size()) - 1)],
                                               o, t);
    }
  }
}

}  // namespace

TEST_CASE("extension mixing examples") {
  auto two = check_extension_mixing(parity(), 8);
  CHECK(two.status == MixingStatus::failed);
  CHECK(two.lattice_index == 2);
  CHECK_FALSE(two.lattice_basis.empty());

  auto three = check_extension_mixing(load_skew("full3_z.cfg"), 8);
  CHECK(three.status == MixingStatus::verified);
  CHECK(three.lattice_index == 1);

  auto full = ShiftSystem::full(2);
  auto flat = make_skew(full, Potential::zero(full), z1({0, 0}));
  CHECK(check_extension_mixing(flat, 8).status == MixingStatus::failed);

  ShiftSystem cycle(2, {0, 1, 1, 0});
  CHECK_THROWS_AS(check_extension_mixing(make_skew(cycle, Potential::zero(cycle), z1({1, -1})), 8), ContractError);
}

TEST_CASE("constrained sum examples") {
  CHECK(constrained_sum(parity(), 4, ConstraintMode::periodic_all()).value() == doctest::Approx(6.0));
  CHECK(constrained_sum(load_skew("free2.cfg"), 4, ConstraintMode::periodic_all()).value() ==
        doctest::Approx(28.0));
  CHECK(constrained_sum(load_skew("heisenberg.cfg"), 4, ConstraintMode::periodic_all()).value() ==
        doctest::Approx(28.0));
  CHECK(constrained_sum(parity(), 5, ConstraintMode::periodic_all()).empty());
}

TEST_CASE("budget errors name the faster paths") {
  DpOptions tiny;
  tiny.budget = 1000;
  tiny.method = DpMethod::dense;
  try {
    constrained_sum(load_skew("free2.cfg"), 30, ConstraintMode::periodic_all(), tiny);
    FAIL("expected a budget error");
  } catch (const BudgetError& e) {
    CHECK(std::string(e.what()).find("radial") != std::string::npos);
  }
}

TEST_CASE("free group radial path") {
  auto sys = load_skew("free2.cfg");
  REQUIRE(radial_applicable(sys));
  CHECK(free_group_radial_sum(sys, 2).value() == doctest::Approx(4.0));
  CHECK(free_group_radial_sum(sys, 4).value() == doctest::Approx(28.0));
  auto seq = free_group_radial_sequence(sys, 10);
  for (int n = 1; n <= 10; ++n) {
    CAPTURE(n);
    auto dp = constrained_sum(sys, n, ConstraintMode::periodic_all());
    if (dp.empty())
      CHECK(seq[n - 1].empty());
    else
      CHECK(seq[n - 1].value() == doctest::Approx(dp.value()).epsilon(1e-12));
  }
  double rate = free_group_radial_sum(sys, 200).rate();
  // the raw rate sits O(log n / n) below the limit; the fitted estimate is
  // checked in the extension pressure test
  CHECK(rate < std::log(2.0 * std::sqrt(3.0)));
  CHECK(rate > std::log(2.0 * std::sqrt(3.0)) - 0.04);
  CHECK_FALSE(radial_applicable(load_skew("heisenberg.cfg")));
}

TEST_CASE("Fourier path examples") {
  auto sys = parity();
  CHECK(fourier_constrained_sum(sys, 4, {0}, 9).value() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(fourier_constrained_sum(sys, 4, {2}, 9).value() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(fourier_constrained_sum(sys, 4, {5}, 9).empty());
  CHECK(nyquist_points(sys, 4) == 9);
  CHECK_THROWS_AS(fourier_constrained_sum(sys, 4, {0}, 8), ContractError);
}

TEST_CASE("local limit") {
  auto two = local_limit_ratio(parity(), {0.0}, 200);
  CHECK(std::abs(two.ratio / std::sqrt(2.0 / std::numbers::pi) - 1.0) <= 0.02);
  CHECK(two.index == 2);
  CHECK(two.normalized == doctest::Approx(two.ratio / 2.0));

  auto three = load_skew("full3_z.cfg");
  auto a = local_limit_ratio(three, {0.0}, 150);
  auto b = local_limit_ratio(three, {0.0}, 200);
  CHECK(a.ratio > 0.0);
  CHECK(std::abs(a.ratio / b.ratio - 1.0) < 5e-4);
}

TEST_CASE("extension pressure") {
  auto est = extension_pressure(load_skew("free2.cfg"), 100, 200);
  CHECK(est.method == "radial");
  CHECK(std::abs(est.estimate - std::log(2.0 * std::sqrt(3.0))) <= 0.01);
  CHECK(est.lower_certified);
  CHECK(est.upper_bound == doctest::Approx(kLog4).epsilon(1e-10));
  CHECK(est.prediction_flag);
  for (double lb : est.lower_bounds) CHECK(lb <= est.upper_bound);

  auto ab = extension_pressure(load_skew("free2.cfg").abelianized(), 100, 200);
  CHECK(ab.method == "fourier");
  CHECK(std::abs(ab.estimate - kLog4) <= 0.01);
  CHECK_FALSE(ab.prediction_flag);

  auto small = extension_pressure(load_skew("heisenberg.cfg"), 4, 12);
  CHECK(small.sequence.size() == 9);
  for (const auto& v : small.sequence)
    if (!v.empty()) CHECK(v.rate() <= kLog4 + 1e-12);
}

TEST_CASE("growth fit recovers exact data") {
  std::vector<int> n;
  std::vector<double> y;
  for (int k = 10; k <= 40; k += 2) {
    n.push_back(k);
    y.push_back(1.3 * k - 1.5 * std::log(k) + 0.25);
  }
  auto fit = fit_growth(n, y);
  REQUIRE(fit);
  CHECK(fit->slope == doctest::Approx(1.3).epsilon(1e-10));
  CHECK(fit->log_exponent == doctest::Approx(-1.5).epsilon(1e-9));
  CHECK_FALSE(fit_growth({1, 2}, {0.0, 1.0}));
}

TEST_CASE("l2 growth bracket") {
  for (const char* name : {"free2.cfg", "full3_z.cfg", "heisenberg.cfg"}) {
    CAPTURE(name);
    auto sys = load_skew(name);
    const int a = 0;
    auto growth = l2_norm_growth(sys, 12, a);
    auto mu = gibbs(sys.shift(), sys.potential());
    const auto& r = mu.perron.right;
    double spread = 0.0;
    for (int j = 0; j < sys.shift().size(); ++j) spread += 1.0 / r[j];
    spread *= r[a];
    for (auto [n, v] : growth) {
      CAPTURE(n);
      auto z = constrained_sum(sys, n, ConstraintMode::periodic_cylinder(a));
      if (!z.empty()) CHECK(v >= z.rate() - 1e-12);
      CHECK(v <= mu.pressure + std::log(spread) / n + 1e-12);
    }
  }
  auto f2 = l2_norm_growth(load_skew("free2.cfg"), 14, 0);
  CHECK(f2.back().first == 14);
  CHECK(f2.back().second <= kLog4 - 0.05);

  auto three = l2_norm_growth(load_skew("full3_z.cfg"), 30, 0);
  CHECK(std::abs(three.back().second - std::log(3.0)) <= 0.1);

  // trivial group: the bracket pins the value to the pressure up to O(1/n)
  auto full = ShiftSystem::full(2);
  auto trivial = make_skew(full, Potential::zero(full), Cocycle::trivial(2));
  for (auto [n, v] : l2_norm_growth(trivial, 20, 0)) CHECK(std::abs(v - std::log(2.0)) <= std::log(2.0) / n + 1e-12);
}

TEST_CASE("eta series diagnostic") {
  auto full = ShiftSystem::full(2);
  auto trivial = make_skew(full, Potential::zero(full), Cocycle::trivial(2));
  BasePoint o{{}, {0}};
  auto d = eta_series_diagnostic(trivial, o, 0, Group::lattice(0).identity(), 4.0, 30, std::log(2.0));
  CHECK(d.reachable);
  CHECK(d.remainder < 1e-8);
  CHECK(d.term_ratio == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.value > 0.0);

  auto far = eta_series_diagnostic(parity(), o, 0, LatticeElement{{100}}, 4.0, 30, std::log(2.0));
  CHECK(far.value == 0.0);
  CHECK_FALSE(far.reachable);
  CHECK_FALSE(far.warning.empty());

  auto f2 = load_skew("free2.cfg");
  const double rho = std::log(2.0 * std::sqrt(3.0));
  auto x = eta_series_diagnostic(f2, o, 0, f2.group().parse("g1"), 1.1 * std::exp(rho), 14, rho);
  CHECK(std::isfinite(x.ratio_to_identity));
  CHECK(x.ratio_to_identity > 0.0);

  CHECK_THROWS_AS(eta_series_diagnostic(trivial, o, 0, Group::lattice(0).identity(), 1.5, 30, std::log(2.0)),
                  ConvergenceError);
}

TEST_CASE("property: G-constrained sums never exceed the abelianized ones") {
  for (const char* name : {"free2.cfg", "heisenberg.cfg"}) {
    auto sys = load_skew(name);
    auto ab = sys.abelianized();
    for (int n = 1; n <= 12; ++n) {
      CAPTURE(n);
      CHECK(constrained_sum(sys, n, ConstraintMode::periodic_all()).value() <=
            constrained_sum(ab, n, ConstraintMode::periodic_all()).value() * (1 + 1e-12));
    }
  }
  gen::Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 2, 4), 0.7);
    auto sys = make_skew(s, gen::potential(rng, s, 2, 0.5), gen::cocycle(rng, Group::heisenberg(), s.size()));
    auto ab = sys.abelianized();
    for (int n = 1; n <= 8; ++n)
      CHECK(constrained_sum(sys, n, ConstraintMode::periodic_all()).value() <=
            constrained_sum(ab, n, ConstraintMode::periodic_all()).value() * (1 + 1e-12));
  }
}

TEST_CASE("property: every DP path matches brute force") {
  gen::Rng rng(52);
  for (int trial = 0; trial < 30; ++trial) {
    auto groups = gen::groups();
    const auto& group = groups[trial % groups.size()];
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 3), 0.7);
    auto sys = make_skew(s, gen::potential(rng, s, 2, 0.5), gen::cocycle(rng, group, s.size(), 2));
    for (int kind = 0; kind < 4; ++kind) {
      auto mode = random_mode(rng, sys, kind, trial % 3 == 0);
      for (int n = 1; n <= 10; ++n) {
        CAPTURE(group.name());
        CAPTURE(mode.name());
        CAPTURE(n);
        double brute = oracle::constrained_sum(sys, n, mode);
        DpOptions dense, hash;
        dense.method = DpMethod::dense;
        hash.method = DpMethod::hash;
        double a = constrained_sum(sys, n, mode, dense).value();
        double b = constrained_sum(sys, n, mode, hash).value();
        CHECK(a == doctest::Approx(brute).epsilon(1e-10));
        CHECK(b == doctest::Approx(brute).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("property: sequences match single sums") {
  gen::Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 2, 4), 0.6);
    auto sys = make_skew(s, gen::potential(rng, s, 2, 0.5), gen::cocycle(rng, Group::lattice(1), s.size(), 2));
    auto mode = random_mode(rng, sys, trial % 2, trial % 3 == 0);
    auto seq = constrained_sequence(sys, 12, mode);
    for (int n = 1; n <= 12; ++n) {
      auto single = constrained_sum(sys, n, mode);
      CAPTURE(n);
      if (single.empty())
        CHECK(seq[n - 1].empty());
      else
        CHECK(seq[n - 1].value() == doctest::Approx(single.value()).epsilon(1e-10));
    }
    if (mode.target) continue;
    auto fourier = fourier_sequence(sys, 12, {0});
    if (mode.kind != ConstraintMode::Kind::periodic_all) continue;
    for (int n = 1; n <= 12; ++n)
      if (!seq[n - 1].empty()) CHECK(fourier[n - 1].value() == doctest::Approx(seq[n - 1].value()).epsilon(1e-8));
  }
}

TEST_CASE("property: constrained sums never exceed the untwisted trace") {
  gen::Rng rng(54);
  for (int trial = 0; trial < 15; ++trial) {
    auto s = gen::shift(rng, gen::uniform_int(rng, 1, 4), 0.6);
    auto phi = gen::potential(rng, s, 2, 0.5);
    auto sys = make_skew(s, phi, gen::cocycle(rng, Group::free(2), s.size()));
    auto traces = trace_powers(build_operator(s, phi, no_displacement(s.size()), {}, {}), 10);
    for (int n = 1; n <= 10; ++n)
      CHECK(constrained_sum(sys, n, ConstraintMode::periodic_all()).value() <= traces[n - 1].real() * (1 + 1e-12));
  }
}
