#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "myxo/angular_grid.hpp"
#include "myxo/collision_kernel.hpp"
#include "myxo/transport_metrics.hpp"

namespace myxo {

/// Parameters (rho+, rho-, phi+) of the nematic equilibrium
/// rho+ delta(phi - phi+) + rho- delta(phi - phi+ - pi) reached from
/// two-group data.
struct EquilibriumTarget {
  double rho_plus = 0.0;
  double rho_minus = 0.0;
  double phi_plus = 0.0;

  AtomicMeasure as_measure() const;
};

/// Per-snapshot diagnostics. Quantities tied to the equilibrium target are
/// absent for data that is not two-group.
struct MomentRecord {
  double time = 0.0;
  double total_mass = 0.0;
  std::array<double, 2> mean_velocity{0.0, 0.0};
  double rho_plus = 0.0;
  double rho_minus = 0.0;
  double out_of_group_mass = 0.0;
  double phibar_plus = 0.0;
  double phibar_minus = 0.0;
  double first_moment = 0.0;
  std::optional<double> variance;
  std::optional<double> m1;
  std::optional<double> w2_to_equilibrium;
  std::optional<double> w2_to_partial;
  std::optional<double> lyapunov_H;
};

/// Rectangle-rule moments. With a target, V = sum over both groups of the
/// squared circular distance to phi+ (resp. phi+ - pi), and M1 likewise with
/// absolute distances; the transport quantities are filled when the state
/// carries no mass outside the groups.
MomentRecord moments(const AngularGrid& grid, const DistributionState& state,
                     const std::optional<EquilibriumTarget>& target);

/// V0 exp(-t rho+ / 2).
double maxwellian_variance_reference(double V0, double rho_plus, double t);

struct HaffBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = (M1_0^-1 + 2t)^-2 / rho+, upper = (V0^-1/2 + kappa t)^-2 with
/// kappa = sqrt(rho+) / (4 pi).
HaffBounds haff_bounds(double V0, double M1_0, double rho_plus, double t);

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

struct FitResult {
  double value = 0.0;  ///< rate (exponential) or exponent (power)
  double intercept = 0.0;
  double residual_rms = 0.0;
  double max_abs_residual = 0.0;  ///< in log y
  std::size_t points = 0;

  /// Residual check: the log-linear model explains the data to `tol`.
  bool consistent(double tol = 1e-3) const noexcept { return max_abs_residual <= tol; }
};

/// Least-squares slope of log y against t over the window, negated.
/// Throws FitError with fewer than 3 points or non-positive y in the window.
FitResult fit_exponential(std::span<const double> t, std::span<const double> y, FitWindow window);

/// Least-squares slope of log y against log t over the window (t > 0).
FitResult fit_power(std::span<const double> t, std::span<const double> y, FitWindow window);

}  // namespace myxo
