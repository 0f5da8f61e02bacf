#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "myxo/angular_grid.hpp"
#include "myxo/scenarios.hpp"

namespace testutil {

/// Random nonnegative densities, reproducible from the seed.
inline std::vector<double> random_state(const myxo::AngularGrid& g, std::uint64_t seed, bool two_group_only = false) {
  myxo::CounterRng rng(seed);
  std::vector<double> f(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (two_group_only && g.group_of(k) == myxo::Group::Neither) continue;
    f[k] = rng.uniform(k) / g.dphi();
  }
  return f;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace testutil
