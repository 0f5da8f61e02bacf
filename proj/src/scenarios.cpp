#include "myxo/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "myxo/errors.hpp"

namespace myxo {

using std::numbers::pi;

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

namespace {

constexpr std::pair<ScenarioKind, std::string_view> kKindNames[] = {
    {ScenarioKind::TwoGroupUniform, "two_group_uniform"},
    {ScenarioKind::TwoGroupVacuumBands, "two_group_vacuum_bands"},
    {ScenarioKind::OneGroupUniform, "one_group_uniform"},
    {ScenarioKind::TwoPatches, "two_patches"},
    {ScenarioKind::PerturbedUniformRandom, "perturbed_uniform_random"},
    {ScenarioKind::PerturbedUniformPoint, "perturbed_uniform_point"},
    {ScenarioKind::PointMasses, "point_masses"},
};

void require_mass(double m, const char* what) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidArgument(std::string(what) + " must be a finite mass >= 0");
}

// Spreads `mass` uniformly over the grid cells selected by `inside`.
template <class Pred>
void fill_uniform(const AngularGrid& grid, std::vector<double>& f, double mass, Pred inside, const char* what) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) count += inside(k);
  if (count == 0) {
    if (mass == 0.0) return;
    throw InvalidArgument(std::string(what) + " contains no grid point");
  }
  const double value = mass / (static_cast<double>(count) * grid.dphi());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (inside(k)) f[k] += value;
  }
}

}  // namespace

std::string_view to_string(ScenarioKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw InvalidArgument("unknown scenario kind '" + std::string(name) + "'");
}

std::vector<Patch> ScenarioSpec::default_patches() {
  return {{0.30 * pi, 0.04 * pi, 0.5}, {-0.32 * pi, 0.04 * pi, 0.5}};
}

bool ScenarioSpec::is_two_group() const noexcept {
  switch (kind) {
    case ScenarioKind::TwoGroupUniform:
    case ScenarioKind::TwoGroupVacuumBands:
    case ScenarioKind::OneGroupUniform:
    case ScenarioKind::TwoPatches:
      return true;
    default:
      return false;
  }
}

std::size_t perturbation_index(const AngularGrid& grid, const ScenarioSpec& spec) {
  if (spec.point_index) {
    if (*spec.point_index >= grid.size()) throw InvalidArgument("point_index outside the grid");
    return *spec.point_index;
  }
  return static_cast<std::size_t>(CounterRng(spec.seed).bits(0) % grid.size());
}

DistributionState make_initial(const AngularGrid& grid, const ScenarioSpec& spec) {
  DistributionState s;
  s.values.assign(grid.size(), 0.0);
  auto& f = s.values;
  auto in_group = [&grid](Group g) { return [&grid, g](std::size_t k) { return grid.group_of(k) == g; }; };

  switch (spec.kind) {
    case ScenarioKind::TwoGroupUniform:
      require_mass(spec.mass_plus, "mass_plus");
      require_mass(spec.mass_minus, "mass_minus");
      fill_uniform(grid, f, spec.mass_plus, in_group(Group::Plus), "plus group");
      fill_uniform(grid, f, spec.mass_minus, in_group(Group::Minus), "minus group");
      break;

    case ScenarioKind::TwoGroupVacuumBands: {
      require_mass(spec.mass_plus, "mass_plus");
      require_mass(spec.mass_minus, "mass_minus");
      const double h = spec.band_half_width;
      if (!(h > 0.0 && h < pi / 4)) throw InvalidArgument("band_half_width must lie in (0, pi/4)");
      auto outside_band = [&](Group g, double centre) {
        return [&grid, g, centre, h](std::size_t k) {
          return grid.group_of(k) == g && circular_distance(grid.angle(k), centre) >= h;
        };
      };
      fill_uniform(grid, f, spec.mass_plus, outside_band(Group::Plus, pi / 2), "plus group outside the band");
      fill_uniform(grid, f, spec.mass_minus, outside_band(Group::Minus, -pi / 2), "minus group outside the band");
      break;
    }

    case ScenarioKind::OneGroupUniform:
      require_mass(spec.mass, "mass");
      fill_uniform(grid, f, spec.mass, in_group(Group::Plus), "plus group");
      break;

    case ScenarioKind::TwoPatches:
      if (spec.patches.empty()) throw InvalidArgument("two_patches needs at least one patch");
      for (const auto& p : spec.patches) {
        require_mass(p.mass, "patch mass");
        if (!(p.half_width > 0.0)) throw InvalidArgument("patch half_width must be > 0");
        const double c = wrap_angle(p.center);
        const Group g = angle_in_group(c, Group::Plus) ? Group::Plus
                        : angle_in_group(c, Group::Minus) ? Group::Minus
                                                            : Group::Neither;
        const double lo = g == Group::Plus ? pi / 4 : -3 * pi / 4;
        if (g == Group::Neither || c - p.half_width < lo || c + p.half_width > lo + pi / 2) {
          throw InvalidArgument("patch centred at " + std::to_string(c) + " with half width " +
                                std::to_string(p.half_width) + " does not fit inside a group arc");
        }
        fill_uniform(
            grid, f, p.mass,
            [&grid, c, hw = p.half_width](std::size_t k) { return circular_distance(grid.angle(k), c) < hw; },
            "patch");
      }
      break;

    case ScenarioKind::PerturbedUniformRandom: {
      require_mass(spec.mass, "mass");
      const double a = spec.amplitude;
      if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("amplitude must lie in [0, 1]");
      const double c = spec.mass / (2 * pi);
      const CounterRng rng(spec.seed);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        f[k] = a == 0.0 ? c : c * (1.0 + a * (2.0 * rng.uniform(k) - 1.0));
      }
      break;
    }

    case ScenarioKind::PerturbedUniformPoint: {
      require_mass(spec.mass, "mass");
      const double a = spec.amplitude;
      if (!(a >= 0.0)) throw InvalidArgument("amplitude must be >= 0");
      const double c = spec.mass / (2 * pi);
      for (auto& v : f) v = c;
      f[perturbation_index(grid, spec)] += a * spec.mass / grid.dphi();
      break;
    }

    case ScenarioKind::PointMasses:
      if (spec.atoms.empty()) throw InvalidArgument("point_masses needs at least one atom");
      for (const auto& atom : spec.atoms) {
        require_mass(atom.mass, "atom mass");
        f[grid.nearest_index(atom.angle)] += atom.mass / grid.dphi();
      }
      break;
  }
  return s;
}

EquilibriumTarget equilibrium_target(const AngularGrid& grid, const DistributionState& initial,
                                     double leak_tolerance) {
  const auto& f = initial.values;
  if (f.size() != grid.size()) throw GridMismatch("state does not live on the grid");
  double rp = 0.0, rm = 0.0, out = 0.0, moment = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    switch (grid.group_of(k)) {
      case Group::Plus:
        rp += f[k];
        moment += grid.angle(k) * f[k];
        break;
      case Group::Minus:
        rm += f[k];
        moment += (grid.angle(k) + pi) * f[k];
        break;
      case Group::Neither:
        out += f[k];
        break;
    }
  }
  const double total = rp + rm + out;
  if (out > leak_tolerance * total) {
    throw NotTwoGroup("initial data has " + std::to_string(out * grid.dphi()) + " mass outside the two groups");
  }
  if (rp + rm <= 0.0) throw NotTwoGroup("initial data carries no mass in the groups");
  return {rp * grid.dphi(), rm * grid.dphi(), moment / (rp + rm)};
}

}  // namespace myxo
