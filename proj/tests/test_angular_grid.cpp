#include <doctest.h>

#include <cmath>
#include <numbers>

#include "myxo/angular_grid.hpp"
#include "myxo/errors.hpp"

using namespace myxo;
using std::numbers::pi;

TEST_CASE("build_grid sizes and spacing") {
  const auto g = build_grid(201);
  CHECK(g.size() == 402);
  CHECK(g.dphi() == doctest::Approx(pi / 201).epsilon(1e-15));
  CHECK(g.dphi() * static_cast<double>(g.size()) == doctest::Approx(2 * pi).epsilon(1e-15));
  for (std::size_t k = 1; k < g.size(); ++k) {
    CHECK(g.angle(k) - g.angle(k - 1) == doctest::Approx(g.dphi()).epsilon(1e-12));
  }
  CHECK(g.angle(0) == -pi);
  CHECK(g.angle(g.size() - 1) < pi);
}

TEST_CASE("n = 3 angles") {
  const auto g = build_grid(3);
  const double expect[] = {-pi, -2 * pi / 3, -pi / 3, 0.0, pi / 3, 2 * pi / 3};
  for (std::size_t k = 0; k < 6; ++k) CHECK(g.angle(k) == doctest::Approx(expect[k]).epsilon(1e-15));
}

TEST_CASE("invalid n") {
  CHECK_THROWS_AS(build_grid(4), InvalidArgument);
  CHECK_THROWS_AS(build_grid(0), InvalidArgument);
  CHECK_THROWS_AS(build_grid(-3), InvalidArgument);
  CHECK_THROWS_AS(build_grid(1), InvalidArgument);
}

TEST_CASE("index_distance") {
  const auto g3 = build_grid(3);
  CHECK(g3.index_distance(0, 5) == 1);
  CHECK(g3.index_distance(0, 3) == 3);
  CHECK(build_grid(201).index_distance(10, 10) == 0);
}

TEST_CASE("reversal_partner") {
  const auto g3 = build_grid(3);
  CHECK(g3.reversal_partner(0) == 3);
  CHECK(g3.reversal_partner(4) == 1);
  const auto g = build_grid(201);
  CHECK(g.reversal_partner(100) == 301);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.reversal_partner(g.reversal_partner(k)) == k);
}

TEST_CASE("group_of") {
  const auto g3 = build_grid(3);
  CHECK(g3.group_of(4) == Group::Plus);
  CHECK(g3.group_of(1) == Group::Minus);
  CHECK(g3.group_of(3) == Group::Neither);
  for (int n : {3, 5, 21, 201}) {
    const auto g = build_grid(n);
    CHECK(g.group_count(Group::Plus) == g.group_count(Group::Minus));
    std::size_t plus = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const bool inside = g.angle(k) > pi / 4 && g.angle(k) < 3 * pi / 4;
      CHECK((g.group_of(k) == Group::Plus) == inside);
      if (g.group_of(k) == Group::Plus) {
        ++plus;
        CHECK(g.group_of(g.reversal_partner(k)) == Group::Minus);
      }
    }
    CHECK(plus == g.group_count(Group::Plus));
  }
  // floor(n/2) for n = 1 mod 4, ceil(n/2) for n = 3 mod 4.
  CHECK(build_grid(201).group_count(Group::Plus) == 100);
  CHECK(build_grid(5).group_count(Group::Plus) == 2);
  CHECK(build_grid(3).group_count(Group::Plus) == 2);
  CHECK(build_grid(7).group_count(Group::Plus) == 4);
}

TEST_CASE("alignment_midpoint") {
  const auto g3 = build_grid(3);
  CHECK(g3.alignment_midpoint(2, 4) == std::optional<std::size_t>(3));
  CHECK_FALSE(g3.alignment_midpoint(1, 2).has_value());
  const auto g5 = build_grid(5);
  const auto mid = g5.alignment_midpoint(9, 1);
  REQUIRE(mid.has_value());
  CHECK(*mid == 0);
  // Angle arithmetic: the short-arc midpoint of phi_9 and phi_1 is phi_0.
  const double a = g5.angle(9), b = g5.angle(1);
  CHECK(circular_distance(wrap_angle(b + circular_difference(a, b) / 2), g5.angle(0)) < 1e-12);
  CHECK(g5.alignment_midpoint(0, 6) == std::optional<std::size_t>(8));
  CHECK_FALSE(g5.alignment_midpoint(0, 5).has_value());
}

TEST_CASE("no pair exactly pi/2 or pi/4 apart in index distance") {
  for (int n : {3, 5, 7, 201}) {
    const auto g = build_grid(n);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto d = static_cast<double>(g.index_distance(0, k));
      CHECK(d != n / 2.0);
      CHECK(d != n / 4.0);
    }
  }
}

TEST_CASE("alignment pre-image map keeps pairs on the grid") {
  const auto g = build_grid(7);
  const long long N = static_cast<long long>(g.size());
  for (long long k = 0; k < N; ++k) {
    for (long long ks = 0; ks < N; ++ks) {
      const auto a = g.wrap(2 * k - ks);
      const auto b = g.wrap(2 * ks - k);
      CHECK(a < g.size());
      CHECK(b < g.size());
      CHECK(circular_distance(g.angle(a), wrap_angle(2 * g.angle(k) - g.angle(ks))) < 1e-12);
    }
  }
}

TEST_CASE("circular helpers") {
  CHECK(circular_distance(0.0, pi) == doctest::Approx(pi));
  CHECK(circular_distance(-pi + 0.1, pi - 0.1) == doctest::Approx(0.2));
  CHECK(circular_difference(0.1, -0.1) == doctest::Approx(0.2));
  CHECK(circular_difference(-pi + 0.1, pi - 0.1) == doctest::Approx(0.2));
  CHECK(wrap_angle(pi) == doctest::Approx(-pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(angle_in_group(pi / 2, Group::Plus));
  CHECK_FALSE(angle_in_group(pi / 4, Group::Plus));
  CHECK(angle_in_group(-pi / 2, Group::Minus));
  const auto g = build_grid(201);
  CHECK(g.nearest_index(pi / 2 + 0.1 * g.dphi()) == g.wrap(201 + 101));
  CHECK(g.nearest_index(pi - 0.1 * g.dphi()) == 0);
}
