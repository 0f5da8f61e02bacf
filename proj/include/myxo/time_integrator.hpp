#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "myxo/collision_kernel.hpp"
#include "myxo/diagnostics.hpp"

namespace myxo {

enum class NegativityPolicy { Abort, WarnAndClampToZero };

std::string_view to_string(NegativityPolicy p) noexcept;
NegativityPolicy negativity_policy_from_string(std::string_view name);

struct IntegrationConfig {
  double dt = 0.1;
  double t_end = 0.0;
  std::size_t snapshot_stride = 1;
  NegativityPolicy negativity_policy = NegativityPolicy::Abort;

  /// Throws InvalidArgument unless dt > 0, t_end >= 0 and stride > 0.
  void validate() const;
  /// Number of Euler steps needed to reach t_end (the last one is not shortened).
  std::size_t step_count() const;
};

struct NegativityEvent {
  std::size_t step = 0;
  double time = 0.0;
  std::size_t clamped = 0;
  double min_value = 0.0;
};

struct Trajectory {
  std::vector<DistributionState> snapshots;  ///< empty if states were not kept
  std::vector<MomentRecord> records;
  std::vector<NegativityEvent> negativity_events;
  std::optional<EquilibriumTarget> target;
  std::size_t steps = 0;
};

/// In-place f += dt Q^n(f) using `rate` as scratch. Subnormal results are
/// flushed to zero. Returns the number of clamped entries; under the abort
/// policy a negative entry throws NegativityDetected (step index 0).
std::size_t euler_update(const KernelTables& tables, std::span<double> f, std::span<double> rate, double dt,
                         NegativityPolicy policy, double& min_value);

/// values + dt Q^n(values), time + dt. Under the abort policy a negative
/// value throws NegativityDetected (step index 0; integrate() rethrows with
/// the real index). Under the clamp policy negatives are zeroed and, if
/// `event` is given, recorded there.
DistributionState euler_step(const KernelTables& tables, const DistributionState& state, double dt,
                             NegativityPolicy policy = NegativityPolicy::Abort, NegativityEvent* event = nullptr);

/// Called for every snapshot (t = 0, every stride steps, and the final state).
using SnapshotObserver = std::function<void(const DistributionState&, const MomentRecord&)>;

struct IntegrateOptions {
  bool keep_states = true;
  /// Equilibrium target used for the diagnostics. When absent it is derived
  /// from the initial state if that state is two-group.
  std::optional<EquilibriumTarget> target;
  SnapshotObserver observer;
};

Trajectory integrate(const KernelTables& tables, const DistributionState& initial, const IntegrationConfig& config,
                     const IntegrateOptions& options = {});

}  // namespace myxo
