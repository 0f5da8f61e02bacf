#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "myxo/angular_grid.hpp"
#include "myxo/collision_kernel.hpp"
#include "myxo/macro_limit.hpp"
#include "myxo/time_integrator.hpp"

namespace myxo {

/// Phase-space density f(x_i, phi_k) for the scaled kinetic equation
///   d_t f + cos(phi) d_x f = Q(f, f) / knudsen
/// on a periodic slab. Storage is cell-major: values[i * 2n + k].
struct KineticField1D {
  double length = 1.0;
  std::size_t cells = 0;
  std::size_t angles = 0;  ///< 2n
  std::vector<double> values;
  double knudsen = 1.0;
  double time = 0.0;

  double dx() const noexcept { return length / static_cast<double>(cells); }
  std::span<double> cell(std::size_t i) noexcept { return {values.data() + i * angles, angles}; }
  std::span<const double> cell(std::size_t i) const noexcept { return {values.data() + i * angles, angles}; }
};

/// dx * dphi * sum f.
double kinetic_mass(const AngularGrid& grid, const KineticField1D& field) noexcept;

struct KineticOptions {
  double cfl = 0.9;
  /// Largest collision-time Euler step used inside collision_substep.
  double dt_hom = 0.01;
  NegativityPolicy negativity_policy = NegativityPolicy::Abort;
};

/// First-order upwind advection of each angular slice at speed cos(phi_k).
/// Throws CflViolation if dt > dx.
KineticField1D transport_substep(const AngularGrid& grid, const KineticField1D& field, double dt);

/// Cell-local homogeneous relaxation over physical time dt: ceil(dt / (knudsen * dt_hom))
/// Euler sub-steps of the collision operator, each of collision time dt / (knudsen * m).
KineticField1D collision_substep(const KernelTables& tables, const KineticField1D& field, double dt,
                                 const KineticOptions& options = {});

/// transport(dt/2), collision(dt), transport(dt/2).
KineticField1D strang_step(const KernelTables& tables, const KineticField1D& field, double dt,
                           const KineticOptions& options = {});

/// Per-cell group masses and reversal-adjusted mean angle phi+. Throws
/// NotTwoGroup if a cell carries 1% or more of its mass outside the groups.
MacroState1D macro_projection(const AngularGrid& grid, const KineticField1D& field);

/// Per-cell nematic equilibrium of a macro state. The Plus atom at phi+ is
/// split linearly between the two bracketing grid directions, so the
/// projection reproduces (rho+, rho-, phi+) exactly; the Minus atom uses the
/// reversal partners. phi+ must lie strictly inside the Plus arc.
KineticField1D equilibrium_field(const AngularGrid& grid, const MacroState1D& macro, double knudsen);

struct KineticRun {
  std::vector<KineticField1D> snapshots;
  std::size_t steps = 0;
};

/// Strang steps with dt = cfl * dx, the last one shortened to land on t_end.
KineticRun run_kinetic(const KernelTables& tables, const KineticField1D& initial, double t_end,
                       const KineticOptions& options = {}, std::size_t snapshot_every = 0);

}  // namespace myxo
