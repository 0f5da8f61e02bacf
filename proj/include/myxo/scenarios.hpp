#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "myxo/angular_grid.hpp"
#include "myxo/collision_kernel.hpp"
#include "myxo/diagnostics.hpp"

namespace myxo {

/// Counter-based generator: draw i is the SplitMix64 finaliser applied to
/// seed + (i + 1) * golden gamma. Draws are independent of call order.
class CounterRng {
 public:
  static constexpr std::string_view kName = "splitmix64-counter";
  static constexpr int kVersion = 1;

  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept;

 private:
  std::uint64_t seed_;
};

enum class ScenarioKind {
  TwoGroupUniform,
  TwoGroupVacuumBands,
  OneGroupUniform,
  TwoPatches,
  PerturbedUniformRandom,
  PerturbedUniformPoint,
  PointMasses,
};

std::string_view to_string(ScenarioKind kind) noexcept;
ScenarioKind scenario_kind_from_string(std::string_view name);

struct Patch {
  double center = 0.0;      ///< radians
  double half_width = 0.0;  ///< radians
  double mass = 0.0;
};

/// Initial-condition recipe. Only the fields relevant to `kind` are read:
///  - TwoGroupUniform: mass_plus, mass_minus
///  - TwoGroupVacuumBands: mass_plus, mass_minus, band_half_width (vacuum
///    around +-pi/2)
///  - OneGroupUniform: mass (placed on the Plus arc)
///  - TwoPatches: patches (each inside one group arc)
///  - PerturbedUniformRandom: mass, amplitude, seed
///  - PerturbedUniformPoint: mass, amplitude, point_index (drawn from seed
///    when absent)
///  - PointMasses: atoms (angles snapped to the nearest grid point)
/// A grid cell is inside an arc iff its centre angle is.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::TwoGroupUniform;
  double mass = 1.0;
  double mass_plus = 0.5;
  double mass_minus = 0.5;
  double band_half_width = 0.1 * 3.141592653589793;
  std::vector<Patch> patches = default_patches();
  double amplitude = 0.01;
  std::optional<std::size_t> point_index;
  std::vector<Atom> atoms;
  std::uint64_t seed = 0;

  /// Two patches a little more than pi/2 apart, one per group.
  static std::vector<Patch> default_patches();
  bool is_two_group() const noexcept;
};

DistributionState make_initial(const AngularGrid& grid, const ScenarioSpec& spec);

/// The perturbed index actually used by a PerturbedUniformPoint spec.
std::size_t perturbation_index(const AngularGrid& grid, const ScenarioSpec& spec);

/// rho+- = dphi sum_{+-} f_k;
/// phi+ = dphi (sum_+ phi_k f_k + sum_- (phi_k + pi) f_k) / (rho+ + rho-).
/// Throws NotTwoGroup if mass outside the groups exceeds `leak_tolerance`
/// times the total mass.
EquilibriumTarget equilibrium_target(const AngularGrid& grid, const DistributionState& initial,
                                     double leak_tolerance = 1e-12);

}  // namespace myxo
