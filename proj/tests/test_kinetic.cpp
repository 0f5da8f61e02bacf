#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "myxo/errors.hpp"
#include "myxo/kinetic_transport_1d.hpp"

using namespace myxo;
using std::numbers::pi;

namespace {

KineticField1D blank(const AngularGrid& g, std::size_t cells, double eps = 0.1) {
  KineticField1D f;
  f.cells = cells;
  f.angles = g.size();
  f.values.assign(cells * g.size(), 0.0);
  f.knudsen = eps;
  return f;
}

MacroState1D smooth_macro(std::size_t cells) {
  return sample_macro_state(
      cells, 1.0, [](double x) { return 0.6 + 0.2 * std::sin(2 * pi * x); },
      [](double x) { return 0.4 + 0.1 * std::cos(2 * pi * x); },
      [](double x) { return pi / 3 + 0.1 * std::sin(2 * pi * x); });
}

}  // namespace

TEST_CASE("transport of a single slice by hand") {
  const auto g = build_grid(5);
  auto f = blank(g, 3);
  const std::size_t k = 5;  // phi = 0, speed 1
  f.values[0 * 10 + k] = 1.0;
  f.values[1 * 10 + k] = 4.0;
  f.values[2 * 10 + k] = 2.0;
  const double dt = 0.5 * f.dx();  // nu = 0.5
  const auto out = transport_substep(g, f, dt);
  CHECK(out.values[0 * 10 + k] == doctest::Approx(1.0 - 0.5 * (1.0 - 2.0)));
  CHECK(out.values[1 * 10 + k] == doctest::Approx(4.0 - 0.5 * (4.0 - 1.0)));
  CHECK(out.values[2 * 10 + k] == doctest::Approx(2.0 - 0.5 * (2.0 - 4.0)));

  // phi = pi: speed -1, upwind from the right.
  auto h = blank(g, 3);
  h.values[0 * 10 + 0] = 1.0;
  h.values[1 * 10 + 0] = 4.0;
  h.values[2 * 10 + 0] = 2.0;
  const auto ho = transport_substep(g, h, dt);
  CHECK(ho.values[0] == doctest::Approx(1.0 + 0.5 * (4.0 - 1.0)));
  CHECK_THROWS_AS(transport_substep(g, f, 1.01 * f.dx()), CflViolation);
}

TEST_CASE("slice speeds are ordered by |cos|") {
  const auto g = build_grid(5);
  auto f = blank(g, 20);
  for (std::size_t k = 0; k < 10; ++k) f.values[5 * 10 + k] = 1.0;
  const auto out = transport_substep(g, f, f.dx());
  // The phi = 0 slice moves a whole cell; slices with smaller |cos| leave more behind.
  CHECK(out.values[5 * 10 + 5] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(out.values[5 * 10 + 7] > out.values[5 * 10 + 6]);
}

TEST_CASE("uniform field is unchanged and mass is conserved") {
  const auto g = build_grid(5);
  auto f = blank(g, 8);
  for (auto& v : f.values) v = 0.3;
  const auto out = transport_substep(g, f, 0.7 * f.dx());
  CHECK(testutil::max_abs_diff(out.values, f.values) < 1e-15);

  const auto m = smooth_macro(50);
  const auto g21 = build_grid(21);
  const auto eq = equilibrium_field(g21, m, 0.1);
  const auto t = transport_substep(g21, eq, 0.9 * eq.dx());
  CHECK(std::fabs(kinetic_mass(g21, t) - kinetic_mass(g21, eq)) <= 1e-13 * kinetic_mass(g21, eq));
}

TEST_CASE("equilibrium cells are unchanged by collisions") {
  const auto g = build_grid(21);
  for (auto cs : {CrossSection::Maxwellian, CrossSection::Rod}) {
    const auto tables = build_tables(g, cs);
    const auto eq = equilibrium_field(g, smooth_macro(20), 0.05);
    const auto out = collision_substep(tables, eq, 0.01);
    CHECK(testutil::max_abs_diff(out.values, eq.values) <= 1e-12 * testutil::max_abs(eq.values));
  }
}

TEST_CASE("collision substep matches the homogeneous integrator") {
  const auto g = build_grid(21);
  const auto tables = build_tables(g, CrossSection::Rod);
  auto f = blank(g, 1, 0.5);
  const auto init = testutil::random_state(g, 4);
  f.values = init;
  KineticOptions o;
  o.dt_hom = 0.01;
  const auto out = collision_substep(tables, f, 0.1, o);  // tau = 0.2 -> 20 substeps of 0.01
  IntegrationConfig c;
  c.dt = 0.01;
  c.t_end = 0.2;
  const auto tr = integrate(tables, {init, 0.0}, c);
  CHECK(testutil::max_abs_diff(out.values, tr.snapshots.back().values) <= 1e-13 * testutil::max_abs(init));
}

TEST_CASE("large knudsen number makes collisions negligible") {
  const auto g = build_grid(21);
  const auto tables = build_tables(g, CrossSection::Maxwellian);
  auto f = blank(g, 2, 1e6);
  f.values = testutil::random_state(g, 8);
  const auto second = testutil::random_state(g, 9);
  f.values.insert(f.values.end(), second.begin(), second.end());
  const auto out = collision_substep(tables, f, 0.01);
  CHECK(testutil::max_abs_diff(out.values, f.values) <= 1e-6 * testutil::max_abs(f.values));
}

TEST_CASE("macro projection") {
  const auto g = build_grid(21);
  const auto m = smooth_macro(30);
  const auto p = macro_projection(g, equilibrium_field(g, m, 0.1));
  for (std::size_t i = 0; i < m.cells(); ++i) {
    CHECK(p.rho_plus[i] == doctest::Approx(m.rho_plus[i]).epsilon(1e-13));
    CHECK(p.rho_minus[i] == doctest::Approx(m.rho_minus[i]).epsilon(1e-13));
    CHECK(p.phi_plus[i] == doctest::Approx(m.phi_plus[i]).epsilon(1e-13));
  }

  auto sym = blank(g, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < g.size(); ++k) sym.values[i * g.size() + k] = g.group_of(k) == Group::Neither ? 0.0 : 1.0;
  }
  for (double phi : macro_projection(g, sym).phi_plus) CHECK(phi == doctest::Approx(pi / 2).epsilon(1e-13));

  sym.values[2 * g.size() + 21] = 5.0;  // phi = 0 in cell 2
  CHECK_THROWS_AS(macro_projection(g, sym), NotTwoGroup);
}

TEST_CASE("strang steps conserve mass and keep two-group support") {
  const auto g = build_grid(21);
  const auto tables = build_tables(g, CrossSection::Maxwellian);
  const auto f0 = equilibrium_field(g, smooth_macro(60), 0.05);
  const auto run = run_kinetic(tables, f0, 0.2, {}, 5);
  CHECK(run.snapshots.back().time == doctest::Approx(0.2));
  const double m0 = kinetic_mass(g, f0);
  for (const auto& s : run.snapshots) {
    CHECK(std::fabs(kinetic_mass(g, s) - m0) <= 1e-12 * m0);
    for (std::size_t i = 0; i < s.cells; ++i) {
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.group_of(k) == Group::Neither) CHECK(s.values[i * g.size() + k] == 0.0);
      }
    }
  }
}
