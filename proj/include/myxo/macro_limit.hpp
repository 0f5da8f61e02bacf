#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace myxo {

/// Cell averages of (rho+, rho-, phi+) on a periodic 1D domain [0, length).
/// The slab is the x-axis, so the transport speed of the Plus group is
/// cos(phi+).
struct MacroState1D {
  double length = 1.0;
  std::vector<double> rho_plus;
  std::vector<double> rho_minus;
  std::vector<double> phi_plus;
  double time = 0.0;

  std::size_t cells() const noexcept { return rho_plus.size(); }
  double dx() const noexcept { return length / static_cast<double>(cells()); }
  double cell_center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx(); }
  /// Throws InvalidArgument on unequal arrays, non-positive length, negative densities.
  void validate() const;
};

/// Conserved variables (rho+, rho-, (rho+ + rho-) phi+).
struct ConservativeVars {
  std::vector<double> q_plus;
  std::vector<double> q_minus;
  std::vector<double> q_angle;
};

ConservativeVars conservative_vars(const MacroState1D& state);

/// Inverse of conservative_vars. Throws VacuumError on a cell with
/// rho+ + rho- <= 0, where phi+ cannot be recovered.
MacroState1D primitive_vars(const ConservativeVars& vars, double length, double time);

/// Projections of omega, -omega and (rho+ - rho-)/(rho+ + rho-) omega on the
/// slab axis. Throws VacuumError on a vacuum cell.
std::array<double, 3> char_speeds(const MacroState1D& state, std::size_t cell);

/// Largest |characteristic speed| over all cells (bounded by 1).
double max_char_speed(const MacroState1D& state);

struct MacroOptions {
  double cfl = 0.9;
  /// Without a floor, vacuum cells abort the step. With a floor, cells whose
  /// total density drops below it keep their previous angle, negative
  /// densities are clamped, and the event is counted.
  std::optional<double> rho_floor;
};

struct MacroStepReport {
  std::size_t floored_cells = 0;
};

/// One first-order Rusanov (local Lax-Friedrichs) update of the conservative
/// system with fluxes (rho+ c, -rho- c, (rho+ - rho-) phi+ c), c = cos(phi+),
/// on periodic cells. Throws CflViolation if dt > cfl * dx / max speed.
MacroState1D macro_step(const MacroState1D& state, double dt, const MacroOptions& options = {},
                        MacroStepReport* report = nullptr);

struct MacroRun {
  std::vector<MacroState1D> snapshots;
  std::size_t steps = 0;
  std::size_t floored_cells = 0;
};

/// Steps with dt = cfl * dx (the speed bound is 1), shortening the last step to
/// land on t_end. Keeps the initial state, every `snapshot_every`-th state and
/// the final state.
MacroRun run_macro(const MacroState1D& initial, double t_end, const MacroOptions& options = {},
                   std::size_t snapshot_every = 0);

/// Sum over cells of dx (|d rho+| + |d rho-| + |d phi+|).
double l1_moment_discrepancy(const MacroState1D& a, const MacroState1D& b);

/// Total variation of phi+ over the periodic cells.
double total_variation_phi(const MacroState1D& state);

/// Samples profiles at cell centres.
MacroState1D sample_macro_state(std::size_t cells, double length, const std::function<double(double)>& rho_plus,
                                const std::function<double(double)>& rho_minus,
                                const std::function<double(double)>& phi_plus);

}  // namespace myxo
