#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "myxo/angular_grid.hpp"

namespace myxo {

/// Collision rate weight b(phi, phi*). Maxwellian: b = 1. Rod: |sin(phi - phi*)|.
enum class CrossSection { Maxwellian, Rod };

double cross_section_weight(CrossSection cs, double phi, double phi_star) noexcept;
std::string_view to_string(CrossSection cs) noexcept;
CrossSection cross_section_from_string(std::string_view name);

/// Densities f_k on the grid (per radian, so mass = dphi * sum f_k) at a time.
/// The grid is identified by the value count 2n.
struct DistributionState {
  std::vector<double> values;
  double time = 0.0;
};

double total_mass(const AngularGrid& grid, std::span<const double> values) noexcept;

/// Precomputed weights of the discrete collision operator.
///
/// Both cross-sections depend only on index differences, so weights are
/// stored once per signed offset:
///  - alignment: offsets s = k* - k with 4|s| < n, weight b(phi_{2k-k*}, phi_{k*}),
///    i.e. the weight for an angle difference of 2|s| grid steps;
///  - reversal: offsets d = k* - k in (-n, n] with 2|d| > n, weight b(phi_k, phi_{k*}).
/// Offsets are stored in ascending order, which is the summation order used
/// in every row.
class KernelTables {
 public:
  KernelTables(AngularGrid grid, CrossSection cs, bool compensated = false);

  const AngularGrid& grid() const noexcept { return grid_; }
  CrossSection cross_section() const noexcept { return cs_; }
  bool compensated() const noexcept { return compensated_; }

  std::span<const long long> alignment_offsets() const noexcept { return align_offsets_; }
  std::span<const double> alignment_weights() const noexcept { return align_weights_; }
  std::span<const long long> reversal_offsets() const noexcept { return rev_offsets_; }
  std::span<const double> reversal_weights() const noexcept { return rev_weights_; }

  double alignment_prefactor() const noexcept { return 2.0 * grid_.dphi(); }
  double reversal_prefactor() const noexcept { return grid_.dphi(); }

 private:
  AngularGrid grid_;
  CrossSection cs_;
  bool compensated_;
  std::vector<long long> align_offsets_;
  std::vector<double> align_weights_;
  std::vector<long long> rev_offsets_;
  std::vector<double> rev_weights_;
};

KernelTables build_tables(const AngularGrid& grid, CrossSection cs, bool compensated = false);

/// Alignment part of Q^n:
///   (2pi/n) sum_{4|k*-k|<n} b_{2k-k*,k*} (f_{2k-k*} f_{k*} - f_k f_{2k*-k}).
/// Throws GridMismatch if the state does not live on the tables' grid.
std::vector<double> apply_alignment(const KernelTables& tables, const DistributionState& state);

/// Reversal part of Q^n:
///   (pi/n) sum_{2|k*-k|>n} b_{k,k*} (f_{k+n} f_{k*+n} - f_k f_{k*}).
std::vector<double> apply_reversal(const KernelTables& tables, const DistributionState& state);

/// Full operator Q^n = alignment + reversal.
std::vector<double> apply(const KernelTables& tables, const DistributionState& state);

/// In-place variant on raw values; `out` must have size 2n. Used by the
/// integrators to avoid per-step allocation of the result.
void apply_into(const KernelTables& tables, std::span<const double> f, std::span<double> out);

}  // namespace myxo
