#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "myxo/diagnostics.hpp"
#include "myxo/errors.hpp"
#include "myxo/scenarios.hpp"

using namespace myxo;
using std::numbers::pi;

TEST_CASE("moments of point masses and equilibria") {
  const auto g = build_grid(201);
  DistributionState s{std::vector<double>(g.size(), 0.0), 0.0};
  s.values[300] = 0.7 / g.dphi();
  s.values[99] = 0.3 / g.dphi();
  const EquilibriumTarget t{0.7, 0.3, g.angle(300)};
  const auto r = moments(g, s, t);
  CHECK(r.total_mass == doctest::Approx(1.0));
  CHECK(*r.variance <= 1e-30);
  CHECK(*r.m1 <= 1e-15);
  CHECK(*r.w2_to_equilibrium <= 1e-15);
  CHECK(*r.lyapunov_H == doctest::Approx(0.0).epsilon(1e-24));
  CHECK(r.rho_plus == doctest::Approx(0.7));
  CHECK(r.rho_minus == doctest::Approx(0.3));
  CHECK(r.total_mass == doctest::Approx(r.rho_plus + r.rho_minus + r.out_of_group_mass));
}

TEST_CASE("one-group uniform variance") {
  const auto g = build_grid(201);
  ScenarioSpec spec;
  spec.kind = ScenarioKind::OneGroupUniform;
  const auto f = make_initial(g, spec);
  const auto r = moments(g, f, equilibrium_target(g, f));
  CHECK(*r.variance == doctest::Approx(pi * pi / 48).epsilon(2e-3));
  CHECK(*r.m1 * *r.m1 <= r.rho_plus * *r.variance);
  CHECK(*r.variance == doctest::Approx(std::pow(*r.w2_to_equilibrium, 2)).epsilon(1e-12));
}

TEST_CASE("variance equals W2 squared on two-group states") {
  const auto g = build_grid(201);
  ScenarioSpec spec;
  spec.kind = ScenarioKind::TwoPatches;
  const auto f = make_initial(g, spec);
  const auto r = moments(g, f, equilibrium_target(g, f));
  CHECK(std::fabs(*r.variance - std::pow(*r.w2_to_equilibrium, 2)) <= 1e-12);
}

TEST_CASE("non two-group data leaves transport fields empty") {
  const auto g = build_grid(21);
  DistributionState s{std::vector<double>(g.size(), 1.0), 0.0};
  const auto r = moments(g, s, EquilibriumTarget{0.5, 0.5, pi / 2});
  CHECK(r.out_of_group_mass > 0.0);
  CHECK_FALSE(r.w2_to_equilibrium.has_value());
  CHECK_FALSE(r.lyapunov_H.has_value());
  CHECK(r.variance.has_value());
  const auto r2 = moments(g, s, std::nullopt);
  CHECK_FALSE(r2.variance.has_value());
}

TEST_CASE("maxwellian reference") {
  CHECK(maxwellian_variance_reference(1.0, 1.0, 0.0) == 1.0);
  CHECK(maxwellian_variance_reference(1.0, 2.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(maxwellian_variance_reference(pi * pi / 48, 1.0, 10.0) == doctest::Approx(pi * pi / 48 * std::exp(-5.0)));
}

TEST_CASE("haff bounds") {
  const auto b0 = haff_bounds(0.2, 0.3, 1.0, 0.0);
  CHECK(b0.upper == doctest::Approx(0.2));
  CHECK(b0.lower == doctest::Approx(0.09));
  CHECK(b0.lower <= b0.upper);
  CHECK(haff_bounds(1.0, 1.0, 1.0, 4 * pi).upper == doctest::Approx(0.25));
  // Both curves decay like t^-2 for large t.
  const double t = 1000.0, h = 1e-3;
  const auto bm = haff_bounds(0.2, 0.3, 1.0, t * (1 - h)), bp = haff_bounds(0.2, 0.3, 1.0, t * (1 + h));
  const double dl = std::log(1 + h) - std::log(1 - h);
  CHECK((std::log(bp.upper) - std::log(bm.upper)) / dl == doctest::Approx(-2.0).epsilon(2e-2));
  CHECK((std::log(bp.lower) - std::log(bm.lower)) / dl == doctest::Approx(-2.0).epsilon(2e-2));
  CHECK_THROWS_AS(haff_bounds(0.0, 1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("fit_exponential") {
  std::vector<double> t, y, c, p;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(i * 0.1);
    y.push_back(std::exp(-0.5 * t.back()));
    c.push_back(3.0);
  }
  const auto r = fit_exponential(t, y, {0.0, 10.0});
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.consistent());
  CHECK(std::fabs(fit_exponential(t, c, {0.0, 10.0}).value) < 1e-14);
  CHECK_THROWS_AS(fit_exponential(t, y, {0.0, 0.15}), FitError);

  std::vector<double> tt, yy;
  for (int i = 10; i <= 100; ++i) {
    tt.push_back(i);
    yy.push_back(std::pow(1.0 + i, -2.0));
  }
  const auto bad = fit_exponential(tt, yy, {10.0, 100.0});
  CHECK(bad.value > 0.0);
  CHECK_FALSE(bad.consistent());
}

TEST_CASE("fit_power") {
  std::vector<double> t, y, h, e;
  for (int i = 100; i <= 1000; i += 10) {
    t.push_back(i);
    y.push_back(std::pow(static_cast<double>(i), -2.0));
    h.push_back(std::pow(std::pow(0.5, -0.5) + 0.1 * i, -2.0));
    e.push_back(std::exp(-0.01 * i));
  }
  CHECK(fit_power(t, y, {100, 1000}).value == doctest::Approx(-2.0).epsilon(1e-10));
  const double s = fit_power(t, h, {100, 1000}).value;
  CHECK(s >= -2.0);
  CHECK(s <= -1.85);
  CHECK_FALSE(fit_power(t, e, {100, 1000}).consistent());
  CHECK(fit_power(t, e, {100, 300}).value != doctest::Approx(fit_power(t, e, {500, 1000}).value).epsilon(0.1));
}
