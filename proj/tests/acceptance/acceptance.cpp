// One line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "../support.hpp"
#include "gurevic/bip.hpp"
#include "gurevic/equidist.hpp"
#include "gurevic/error.hpp"
#include "gurevic/oracle.hpp"
#include "gurevic/transfer.hpp"
#include "gurevic/xi.hpp"

using namespace gurevic;
using gurevic::testing::load_config;
using gurevic::testing::load_skew;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<void(Check&)>& body) {
  Check c;
  c.detail.precision(10);
  auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail << " threw: " << e.what();
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds > limit_seconds) c.require(false, "runtime above " + std::to_string(limit_seconds) + " s");
  if (!c.pass) ++failures;
  std::printf("%s  %2d  %-30s %.2fs |%s\n", c.pass ? "PASS" : "FAIL", id, title, seconds,
              c.detail.str().c_str());
  std::fflush(stdout);
}

const double kLog4 = std::log(4.0);
const double kKesten = std::log(2.0 * std::sqrt(3.0));

}  // namespace

int main() {
  criterion(1, "pressure oracle", 1.0, [](Check& c) {
    auto cfg = load_config("golden_mean.cfg");
    double p = pressure(cfg.shift, cfg.potential);
    double exact = std::log((1.0 + std::sqrt(5.0)) / 2.0);
    c.detail << " P=" << p << " err=" << std::abs(p - exact);
    c.require(std::abs(p - exact) <= 1e-9, "|P - log phi| <= 1e-9");
    c.require(std::abs(p - 0.4812118251) <= 1e-9, "P = 0.4812118251");
    auto traces = trace_powers(build_operator(cfg.shift, cfg.potential, no_displacement(2), {}, {}), 20);
    std::int64_t lucas_prev = 2, lucas = 1;  // L_0, L_1
    bool exact_traces = true;
    for (int n = 1; n <= 20; ++n) {
      std::int64_t count = static_cast<std::int64_t>(enumerate_periodic(cfg.shift, n).size());
      exact_traces = exact_traces && count == lucas && std::llround(traces[n - 1].real()) == lucas &&
                     std::abs(traces[n - 1].real() - static_cast<double>(lucas)) < 1e-6;
      std::int64_t next = lucas + lucas_prev;
      lucas_prev = lucas;
      lucas = next;
    }
    c.detail << " lucas n<=20 " << (exact_traces ? "exact" : "mismatch");
    c.require(exact_traces, "trace(A^n) = L_n for n <= 20");
  });

  criterion(2, "xi closed form", 1.0, [](Check& c) {
    auto tilted = load_skew("full2_tilted.cfg");
    PressureFunction p(tilted);
    auto xi = find_xi(p);
    double target = 0.5 + std::log(2.0);
    c.detail << " xi=" << xi.xi[0] << " p(xi)=" << xi.pressure_at_xi;
    c.require(std::abs(xi.xi[0] + 0.5) <= 1e-8, "xi = -0.5 +- 1e-8");
    c.require(std::abs(xi.pressure_at_xi - target) <= 1e-10, "p(xi) = 0.5 + log 2 +- 1e-10");

    std::vector<SkewSystem> systems{tilted, load_skew("full3_z.cfg"), load_skew("free2.cfg").abelianized()};
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (const auto& sys : systems) {
      PressureFunction f(sys);
      for (int k = 0; k < 20; ++k) {
        std::vector<double> w(sys.rank());
        for (auto& x : w) x = normal(rng);
        auto g = f.gradient(w);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < sys.rank(); ++i) {
          auto plus = w, minus = w;
          plus[i] += 1e-5;
          minus[i] -= 1e-5;
          double fd = (f.value(plus) - f.value(minus)) / 2e-5;
          num += (g[i] - fd) * (g[i] - fd);
          den += g[i] * g[i];
        }
        worst = std::max(worst, std::sqrt(num / den));
      }
    }
    c.detail << " worst grad rel err=" << worst;
    c.require(worst <= 1e-6, "gradient vs finite difference <= 1e-6");
  });

  criterion(3, "constrained-sum exactness", 60.0, [](Check& c) {
    double worst_dp = 0.0, worst_fourier = 0.0;
    int systems = 0;
    bool zero_pattern = true;
    for (const auto& entry : std::filesystem::directory_iterator(GUREVIC_CONFIG_DIR)) {
      if (entry.path().extension() != ".cfg") continue;
      auto cfg = load_system(entry.path());
      SkewSystem sys(cfg.shift, cfg.potential, cfg.cocycle);
      ++systems;
      std::vector<ConstraintMode> modes{ConstraintMode::periodic_all(), ConstraintMode::periodic_cylinder(0)};
      for (const auto& mode : modes)
        for (int n = 1; n <= 10; ++n) {
          double dp = constrained_sum(sys, n, mode).value();
          double brute = oracle::constrained_sum(sys, n, mode);
          if (brute == 0.0)
            zero_pattern = zero_pattern && dp == 0.0;
          else
            worst_dp = std::max(worst_dp, std::abs(dp - brute) / brute);
        }
      auto ab = sys.abelianized();
      auto fourier = fourier_sequence(ab, 12, std::vector<std::int64_t>(ab.rank(), 0));
      for (int n = 1; n <= 12; ++n) {
        double dp = constrained_sum(ab, n, ConstraintMode::periodic_all()).value();
        double fv = fourier[n - 1].value();
        if (dp == 0.0)
          zero_pattern = zero_pattern && fourier[n - 1].empty();
        else
          worst_fourier = std::max(worst_fourier, std::abs(dp - fv) / dp);
      }
    }
    c.detail << " systems=" << systems << " dp-vs-brute=" << worst_dp << " fourier-vs-dp=" << worst_fourier;
    c.require(systems >= 7, "all demo configs found");
    c.require(worst_dp <= 1e-10, "DP = brute force to 1e-10");
    c.require(worst_fourier <= 1e-8, "Fourier = DP to 1e-8");
    c.require(zero_pattern, "empty sets agree");
  });

  criterion(4, "local limit law", 5.0, [](Check& c) {
    auto sys = load_skew("full2_parity.cfg");
    auto ll = local_limit_ratio(sys, {0.0}, 200);
    double target = std::sqrt(2.0 / std::numbers::pi);
    c.detail << " Z_200(0) sqrt(200) 2^-200=" << ll.ratio << " lattice index=" << ll.index
             << " normalized=" << ll.normalized << " rel err=" << std::abs(ll.ratio / target - 1.0);
    c.require(std::abs(ll.ratio / target - 1.0) <= 0.02, "within 2% of sqrt(2/pi)");
  });

  criterion(5, "non-amenable strict gap", 10.0, [](Check& c) {
    auto sys = load_skew("free2.cfg");
    auto g = extension_pressure(sys, 100, 200);
    auto ab = extension_pressure(sys.abelianized(), 100, 200);
    double gap = ab.estimate - g.estimate;
    double width = g.uncertainty + ab.uncertainty;
    c.detail << " G[" << g.method << "]=" << g.estimate << " Gbar[" << ab.method << "]=" << ab.estimate
             << " gap=" << gap << " width=" << width;
    c.require(std::abs(g.estimate - kKesten) <= 0.01, "G estimate within 0.01 of log(2 sqrt 3)");
    c.require(std::abs(ab.estimate - kLog4) <= 0.01, "Gbar estimate within 0.01 of log 4");
    c.require(gap >= 0.13, "gap >= 0.13");
    c.require(width <= 0.02, "bracket width <= 0.02");
  });

  criterion(6, "amenable equality", 180.0, [](Check& c) {
    auto sys = load_skew("heisenberg.cfg");
    auto est = extension_pressure(sys, 20, 40);
    std::vector<int> ns;
    std::vector<double> logs;
    for (const auto& v : est.sequence)
      if (!v.empty()) {
        ns.push_back(v.n);
        logs.push_back(v.log_value);
      }
    auto fit = fit_growth(ns, logs);
    double slope = fit ? fit->slope : 0.0;
    bool increasing = est.lower_certified && est.lower_bounds.back() > est.lower_bounds.front();
    for (std::size_t k = 1; k < est.lower_bounds.size(); ++k)
      increasing = increasing && est.lower_bounds[k] >= est.lower_bounds[k - 1];
    c.detail << " method=" << est.method << " slope[20,40]=" << slope << " last=" << est.last_value
             << " lower bound " << est.lower_bounds.front() << " -> " << est.lower_bounds.back();
    c.require(std::abs(slope - kLog4) <= 0.05, "fitted slope within 0.05 of log 4");
    c.require(std::abs(est.last_value - kLog4) <= 0.15, "last value within 0.15 of log 4");
    c.require(increasing, "certified lower bound increasing");
  });

  criterion(7, "equidistribution", 30.0, [](Check& c) {
    auto cfg = load_config("full2_parity.cfg");
    SkewSystem sys(cfg.shift, cfg.potential, cfg.cocycle);
    const auto& g = cfg.test_function->values;
    double brute6 = oracle::empirical_integral(sys, 6, ConstraintMode::periodic_all(), g);
    c.detail << " brute n=6: " << brute6;
    c.require(std::abs(brute6 - 0.2) <= 1e-12, "n=6 brute force = 0.2");
    double prev = 1.0;
    bool decreasing = true;
    double last = 0.0;
    for (int n : {6, 10, 14, 18, 20}) {
      double d = std::abs(empirical_integral(sys, ConstraintMode::periodic_all(), n, g).value - 0.25);
      decreasing = decreasing && d < prev;
      prev = d;
      last = d;
    }
    c.detail << " |diff| at 20: " << last;
    c.require(last <= 0.05, "|diff| <= 0.05 at n=20");
    c.require(decreasing, "|diff| strictly decreasing");
    const auto& o = *cfg.options.base_point;
    std::vector<ConstraintMode> modes{ConstraintMode::periodic_all(), ConstraintMode::periodic_cylinder(0),
                                      ConstraintMode::preimage(o), ConstraintMode::preimage_cylinder(0, o)};
    std::vector<double> values;
    for (const auto& m : modes) values.push_back(empirical_integral(sys, m, 20, g).value);
    double spread = 0.0;
    for (double a : values)
      for (double b : values) spread = std::max(spread, std::abs(a - b));
    c.detail << " modes at 20:";
    for (double v : values) c.detail << " " << v;
    c.require(spread <= 0.05, "four modes agree within 0.05");
  });

  criterion(8, "large-deviation tail", 30.0, [](Check& c) {
    auto cfg = load_config("full2_parity.cfg");
    SkewSystem sys(cfg.shift, cfg.potential, cfg.cocycle);
    const auto& g = cfg.test_function->values;
    double limit = gibbs_limit(sys, g, default_xi(sys));
    double brute6 = oracle::tail_mass(sys, 6, ConstraintMode::periodic_all(), g, limit, 0.2);
    std::vector<int> ns;
    for (int n = 8; n <= 20; ++n) ns.push_back(n);
    auto report = ld_tail(sys, g, 0.2, ns, ConstraintMode::periodic_all(), limit);
    c.detail << " limit=" << limit << " tail(6)=" << brute6;
    c.require(std::abs(brute6 - 0.1) <= 1e-12, "tail mass 0.1 at n=6");
    if (report.fit)
      c.detail << " eta=" << report.fit->eta << " R2=" << report.fit->r_squared << " points=" << report.fit->points;
    c.require(report.fit && report.fit->eta > 0.0, "eta > 0");
    c.require(report.fit && report.fit->r_squared >= 0.9, "R^2 >= 0.9");
  });

  criterion(9, "twisted spectral radius", 1.0, [](Check& c) {
    auto sys = load_skew("full3_z.cfg");
    auto mixing = check_extension_mixing(sys, 8);
    c.require(mixing.status == MixingStatus::verified, "full 3-shift extension mixing verified");
    PressureFunction p(sys);
    auto xi = find_xi(p);
    double bound = std::exp(xi.pressure_at_xi);
    double worst_margin = 1e300, worst_closed = 0.0;
    auto two = load_skew("full2_parity.cfg");
    const std::vector<double> zero_w{0.0};
    for (int k = 1; k <= 64; ++k) {
      std::vector<double> t{k / 65.0};
      double r = twisted_spectral_radius(sys.shift(), sys.potential(), sys.displacement(), xi.xi, t);
      worst_margin = std::min(worst_margin, bound - r);
      double r2 = twisted_spectral_radius(two.shift(), two.potential(), two.displacement(), zero_w, t);
      worst_closed = std::max(worst_closed, std::abs(r2 - 2.0 * std::abs(std::cos(2.0 * std::numbers::pi * t[0]))));
    }
    c.detail << " min(e^p(xi) - radius)=" << worst_margin << " max|r - 2|cos 2 pi t||=" << worst_closed;
    c.require(worst_margin > 1e-6, "radius < e^p(xi) - 1e-6");
    c.require(worst_closed <= 1e-10, "2|cos 2 pi t| to 1e-10");
  });

  criterion(10, "BIP truncation", 30.0, [](Check& c) {
    auto family = TruncationFamily::zeta(2.0);
    auto rows = convergence_report(family, {64, 128, 256, 512, 1024, 2048, 4096});
    const double limit = std::log(std::numbers::pi * std::numbers::pi / 6.0);
    bool increasing = true, bracketed = true, delta_ok = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k > 0) increasing = increasing && rows[k].pressure > rows[k - 1].pressure;
      bracketed = bracketed && rows[k].pressure <= limit && limit <= rows[k].upper_envelope;
      delta_ok = delta_ok && std::abs(rows[k].delta - std::numbers::ln2) <= 1e-12;
    }
    double gap = limit - rows.back().pressure;
    c.detail << " P_4096=" << rows.back().pressure << " limit-P_4096=" << gap
             << " envelope=" << rows.back().upper_envelope;
    c.require(increasing, "pressure_N increasing");
    c.require(std::abs(gap) <= 1e-4, "within 1e-4 of log(pi^2/6) at N=4096");
    c.require(bracketed, "tail bracket contains the limit");
    c.require(delta_ok, "delta = ln 2 to 1e-12");
  });

  criterion(11, "Gibbs property", 60.0, [](Check& c) {
    auto cfg = load_config("golden_mean_depth2.cfg");
    auto mu = gibbs(cfg.shift, cfg.potential);
    auto b = gibbs_bounds_check(mu, cfg.shift, cfg.potential, 8);
    c.detail << " golden A=" << b.a_emp << " B=" << b.b_emp << " envelope [" << b.envelope_low << ", "
             << b.envelope_high << "]";
    const double slack = 1e-12;
    c.require(b.envelope_low * (1 - slack) <= b.a_emp && b.b_emp <= b.envelope_high * (1 + slack),
              "A, B inside the eigenvector envelope");
    auto full = ShiftSystem::full(2);
    auto zero = Potential::zero(full);
    auto bern = gibbs_bounds_check(gibbs(full, zero), full, zero, 8);
    c.detail << " full2 A=" << bern.a_emp << " B=" << bern.b_emp;
    c.require(bern.a_emp == 1.0 && bern.b_emp == 1.0, "full 2-shift A = B = 1");
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
