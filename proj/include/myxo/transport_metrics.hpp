#pragma once

#include <span>
#include <vector>

#include "myxo/angular_grid.hpp"
#include "myxo/collision_kernel.hpp"

namespace myxo {

struct Atom {
  double angle = 0.0;
  double mass = 0.0;
};

/// Finite sum of point masses on the circle.
struct AtomicMeasure {
  std::vector<Atom> atoms;
  double total_mass() const noexcept;
};

/// Grid state as an atomic measure: atoms (phi_k, f_k * dphi) for f_k > 0.
AtomicMeasure to_atomic(const AngularGrid& grid, std::span<const double> values);

inline constexpr double kDefaultGamma = 8.0 / 7.0;

struct LyapunovRecord {
  double w2_f_fbar_sq = 0.0;
  double w2_fbar_finf_sq = 0.0;
  double gamma = kDefaultGamma;
  double H = 0.0;
  double lambda = 0.0;  ///< min(rho+, rho-) / 4
};

/// Masses and mean angles of the two groups (plain weighted means; neither
/// group arc contains the cut at +-pi). Mean of an empty group is its arc
/// centre.
struct GroupMoments {
  double rho_plus = 0.0;
  double rho_minus = 0.0;
  double rho_outside = 0.0;
  double mean_plus = 0.0;
  double mean_minus = 0.0;
};

GroupMoments group_moments(const AngularGrid& grid, std::span<const double> values) noexcept;

/// W2 between a grid density (already restricted to an arc) and a single
/// atom: sqrt(sum dist(phi_k, target)^2 f_k dphi). Throws MassMismatch if
/// the restricted mass differs from `target_mass` by more than 1e-9 relative.
double w2_to_point_mass(const AngularGrid& grid, std::span<const double> restricted_values,
                        double target_angle, double target_mass);

/// Two atoms at the instantaneous group means with the group masses.
/// Throws NotTwoGroup if mass outside the groups exceeds 1e-12 of the total.
AtomicMeasure partial_equilibrium(const AngularGrid& grid, const DistributionState& state);

/// W2 to a target with one atom per group, computed group by group.
/// Throws MassMismatch if a group mass differs from its atom by > 1e-9 relative.
double w2_two_group(const AngularGrid& grid, const DistributionState& state, const AtomicMeasure& target);

/// H = W2(f, fbar)^2 + gamma W2(fbar, finf)^2. The second term uses the
/// closed form rho+ rho- / (rho+ + rho-) (phibar+ - phibar- - pi)^2 with the
/// difference taken in [0, 2pi).
LyapunovRecord lyapunov(const AngularGrid& grid, const DistributionState& state, const AtomicMeasure& target_finf,
                        double gamma = kDefaultGamma);

/// Quadratic-cost optimal transport distance between atomic measures of
/// equal mass on the circle (cyclic monotone rearrangement).
double w2_circle_general(const AtomicMeasure& mu, const AtomicMeasure& nu);

}  // namespace myxo
