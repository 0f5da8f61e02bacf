#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "myxo/errors.hpp"
#include "myxo/scenarios.hpp"
#include "myxo/transport_metrics.hpp"
#include "oracles.hpp"

using namespace myxo;
using std::numbers::pi;

namespace {

AtomicMeasure random_measure(CounterRng& rng, std::uint64_t& c, std::size_t atoms, double mass) {
  AtomicMeasure m;
  double sum = 0.0;
  for (std::size_t i = 0; i < atoms; ++i) {
    m.atoms.push_back({-pi + 2 * pi * rng.uniform(c++), 0.05 + rng.uniform(c++)});
    sum += m.atoms.back().mass;
  }
  for (auto& a : m.atoms) a.mass *= mass / sum;
  return m;
}

double lp(const AtomicMeasure& a, const AtomicMeasure& b) {
  std::vector<double> xa, ma, xb, mb;
  for (const auto& x : a.atoms) xa.push_back(x.angle), ma.push_back(x.mass);
  for (const auto& x : b.atoms) xb.push_back(x.angle), mb.push_back(x.mass);
  return oracle::lp_w2(xa, ma, xb, mb);
}

}  // namespace

TEST_CASE("w2_to_point_mass") {
  const auto g = build_grid(201);
  std::vector<double> point(g.size(), 0.0);
  point[301] = 1.0 / g.dphi();
  CHECK(w2_to_point_mass(g, point, g.angle(301), 1.0) == 0.0);

  ScenarioSpec spec;
  spec.kind = ScenarioKind::OneGroupUniform;
  const auto f = make_initial(g, spec);
  // 100 equal masses at half-integer offsets from pi/2: dphi^2 (N^2 - 1) / 12.
  const double v_disc = g.dphi() * g.dphi() * (100.0 * 100.0 - 1.0) / 12.0;
  CHECK(w2_to_point_mass(g, f.values, pi / 2, 1.0) == doctest::Approx(std::sqrt(v_disc)).epsilon(1e-12));
  CHECK(v_disc == doctest::Approx(pi * pi / 48).epsilon(0.011));

  const auto g3 = build_grid(3);
  std::vector<double> at0(6, 0.0);
  at0[3] = 1.0 / g3.dphi();
  CHECK(w2_to_point_mass(g3, at0, pi, 1.0) == doctest::Approx(pi));
  CHECK_THROWS_AS(w2_to_point_mass(g3, at0, pi, 1.1), MassMismatch);
}

TEST_CASE("partial_equilibrium") {
  const auto g = build_grid(201);
  const auto f = make_initial(g, ScenarioSpec{});
  const auto pe = partial_equilibrium(g, f);
  REQUIRE(pe.atoms.size() == 2);
  CHECK(pe.atoms[0].angle == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(pe.atoms[0].mass == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pe.atoms[1].angle == doctest::Approx(-pi / 2).epsilon(1e-12));

  const auto g5 = build_grid(5);
  DistributionState s{std::vector<double>(10, 0.0), 0.0};
  s.values[7] = 1.0;  // 2pi/5, Plus
  s.values[8] = 3.0;  // 3pi/5, Plus
  s.values[2] = 2.0;  // -3pi/5, Minus
  const auto pe5 = partial_equilibrium(g5, s);
  CHECK(pe5.atoms[0].angle == doctest::Approx((1.0 * 2 * pi / 5 + 3.0 * 3 * pi / 5) / 4.0));
  CHECK(pe5.atoms[0].mass == doctest::Approx(4.0 * pi / 5));
  CHECK(pe5.atoms[1].angle == doctest::Approx(-3 * pi / 5));

  DistributionState leak = s;
  leak.values[5] = 1.0;
  CHECK_THROWS_AS(partial_equilibrium(g5, leak), NotTwoGroup);
}

TEST_CASE("w2_two_group") {
  const auto g = build_grid(201);
  const auto f = make_initial(g, ScenarioSpec{});
  const auto pe = partial_equilibrium(g, f);
  const double v_disc = g.dphi() * g.dphi() * (100.0 * 100.0 - 1.0) / 12.0;
  CHECK(w2_two_group(g, f, pe) == doctest::Approx(std::sqrt(v_disc)).epsilon(1e-12));
  DistributionState atoms{std::vector<double>(g.size(), 0.0), 0.0};
  atoms.values[300] = 0.25 / g.dphi();
  atoms.values[99] = 0.75 / g.dphi();
  AtomicMeasure target{{{g.angle(300), 0.25}, {g.angle(99), 0.75}}};
  CHECK(w2_two_group(g, atoms, target) == 0.0);
  AtomicMeasure wrong{{{g.angle(300), 0.5}, {g.angle(99), 0.5}}};
  CHECK_THROWS_AS(w2_two_group(g, atoms, wrong), MassMismatch);
}

TEST_CASE("lyapunov closed form") {
  const auto g = build_grid(201);
  // Two atoms at 3pi/5 and -pi/2 (grid directions for n = 5 multiples are not
  // on this grid, so use n = 5 exactly).
  const auto g5 = build_grid(5);
  DistributionState s{std::vector<double>(10, 0.0), 0.0};
  s.values[8] = 0.5 / g5.dphi();  // 3pi/5
  s.values[2] = 0.5 / g5.dphi();  // -3pi/5
  AtomicMeasure finf{{{3 * pi / 5, 0.5}, {-2 * pi / 5, 0.5}}};
  const auto rec = lyapunov(g5, s, finf);
  // phibar+ - phibar- = 6pi/5, so the deviation from pi is pi/5.
  CHECK(rec.w2_fbar_finf_sq == doctest::Approx(0.25 * (pi / 5) * (pi / 5)));
  CHECK(rec.w2_f_fbar_sq == 0.0);
  CHECK(rec.lambda == doctest::Approx(0.125));
  CHECK(rec.H == doctest::Approx(8.0 / 7.0 * 0.25 * (pi / 5) * (pi / 5)));

  const auto f = make_initial(g, ScenarioSpec{});
  const auto fi = AtomicMeasure{{{pi / 2, 0.5}, {-pi / 2, 0.5}}};
  const auto sym = lyapunov(g, f, fi);
  CHECK(sym.w2_fbar_finf_sq == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(sym.H == doctest::Approx(sym.w2_f_fbar_sq));
  CHECK(sym.H == doctest::Approx(g.dphi() * g.dphi() * (100.0 * 100.0 - 1.0) / 12.0).epsilon(1e-12));

  DistributionState eq{std::vector<double>(g.size(), 0.0), 0.0};
  eq.values[300] = 0.5 / g.dphi();
  eq.values[99] = 0.5 / g.dphi();
  const auto at_eq = lyapunov(g, eq, AtomicMeasure{{{g.angle(300), 0.5}, {g.angle(99), 0.5}}});
  CHECK(at_eq.H == doctest::Approx(0.0).epsilon(1e-24));
}

TEST_CASE("lyapunov closed form with the (pi/10)^2 deviation") {
  // phibar+ = 3pi/5, phibar- = -pi/2 on a grid containing both (n = 10 is
  // even, so use n = 5 * 21 = 105 -> dphi = pi/105, 63 dphi = 3pi/5).
  const auto g = build_grid(105);
  DistributionState s{std::vector<double>(g.size(), 0.0), 0.0};
  const std::size_t kp = 105 + 63;
  const std::size_t km = g.nearest_index(-pi / 2);
  s.values[kp] = 0.5 / g.dphi();
  s.values[km] = 0.5 / g.dphi();
  const double dm = g.angle(km);
  const auto rec = lyapunov(g, s, AtomicMeasure{{{g.angle(kp), 0.5}, {g.angle(kp) - pi, 0.5}}});
  const double dev = g.angle(kp) - dm - pi;
  CHECK(rec.w2_fbar_finf_sq == doctest::Approx(0.25 * dev * dev).epsilon(1e-12));
}

TEST_CASE("w2_circle_general basics") {
  AtomicMeasure a{{{0.3, 1.0}}};
  CHECK(w2_circle_general(a, a) == 0.0);
  CHECK(w2_circle_general(AtomicMeasure{{{0.0, 1.0}}}, AtomicMeasure{{{pi, 1.0}}}) == doctest::Approx(pi));
  CHECK_THROWS_AS(w2_circle_general(a, AtomicMeasure{{{0.0, 2.0}}}), MassMismatch);

  AtomicMeasure three{{{0.1, 0.2}, {1.7, 0.3}, {-2.5, 0.5}}};
  AtomicMeasure two{{{2.9, 0.5}, {-0.8, 0.5}}};
  CHECK(w2_circle_general(three, two) == doctest::Approx(lp(three, two)).epsilon(1e-10));
}

TEST_CASE("w2_circle_general equals the LP oracle") {
  CounterRng rng(2024);
  std::uint64_t c = 0;
  for (int inst = 0; inst < 40; ++inst) {
    const std::size_t na = 1 + rng.bits(c++) % 4, nb = 1 + rng.bits(c++) % 4;
    const auto a = random_measure(rng, c, na, 1.0);
    const auto b = random_measure(rng, c, nb, 1.0);
    CHECK(std::fabs(w2_circle_general(a, b) - lp(a, b)) <= 1e-10);
  }
}

TEST_CASE("triangle inequality") {
  CounterRng rng(99);
  std::uint64_t c = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto a = random_measure(rng, c, 3, 1.0);
    const auto b = random_measure(rng, c, 4, 1.0);
    const auto d = random_measure(rng, c, 2, 1.0);
    CHECK(w2_circle_general(a, d) <= w2_circle_general(a, b) + w2_circle_general(b, d) + 1e-10);
  }
}

TEST_CASE("two-group split identity") {
  const auto g = build_grid(21);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = testutil::random_state(g, 500 + seed, true);
    DistributionState s{f, 0.0};
    const auto target = equilibrium_target(g, s);
    const auto finf = target.as_measure();
    CHECK(std::fabs(w2_circle_general(to_atomic(g, f), finf) - w2_two_group(g, s, finf)) <= 1e-10);
  }
}
