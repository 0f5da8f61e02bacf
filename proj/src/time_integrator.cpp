#include "myxo/time_integrator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "myxo/errors.hpp"
#include "myxo/scenarios.hpp"

namespace myxo {

std::string_view to_string(NegativityPolicy p) noexcept {
  return p == NegativityPolicy::Abort ? "abort" : "warn_and_clamp";
}

NegativityPolicy negativity_policy_from_string(std::string_view name) {
  if (name == "abort") return NegativityPolicy::Abort;
  if (name == "warn_and_clamp") return NegativityPolicy::WarnAndClampToZero;
  throw InvalidArgument("unknown negativity policy '" + std::string(name) + "' (expected abort or warn_and_clamp)");
}

void IntegrationConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be >= 0");
  if (snapshot_stride == 0) throw InvalidArgument("snapshot_stride must be > 0");
}

std::size_t IntegrationConfig::step_count() const {
  if (t_end <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

std::size_t euler_update(const KernelTables& tables, std::span<double> f, std::span<double> rate, double dt,
                         NegativityPolicy policy, double& min_value) {
  apply_into(tables, f, rate);
  std::size_t negative = 0;
  min_value = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] += dt * rate[k];
    // Subnormal densities are flushed: they carry no mass at double
    // precision and make the next operator evaluation very slow.
    if (std::fabs(f[k]) < std::numeric_limits<double>::min()) f[k] = 0.0;
    if (f[k] < 0.0) {
      ++negative;
      min_value = std::min(min_value, f[k]);
    }
  }
  if (negative == 0) return 0;
  if (policy == NegativityPolicy::Abort) {
    throw NegativityDetected("explicit step produced " + std::to_string(negative) +
                                 " negative densities (min " + std::to_string(min_value) + ")",
                             0, min_value);
  }
  for (auto& v : f) v = std::max(v, 0.0);
  return negative;
}

DistributionState euler_step(const KernelTables& tables, const DistributionState& state, double dt,
                             NegativityPolicy policy, NegativityEvent* event) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  DistributionState next{state.values, state.time + dt};
  std::vector<double> rate(next.values.size());
  double min_value = 0.0;
  const std::size_t clamped = euler_update(tables, next.values, rate, dt, policy, min_value);
  if (clamped > 0 && event != nullptr) *event = {0, next.time, clamped, min_value};
  return next;
}

Trajectory integrate(const KernelTables& tables, const DistributionState& initial, const IntegrationConfig& config,
                     const IntegrateOptions& options) {
  config.validate();
  const auto& grid = tables.grid();
  if (initial.values.size() != grid.size()) throw GridMismatch("initial state does not live on the grid");

  Trajectory traj;
  traj.target = options.target;
  if (!traj.target) {
    try {
      traj.target = equilibrium_target(grid, initial);
    } catch (const NotTwoGroup&) {
    }
  }

  DistributionState state = initial;
  std::vector<double> rate(state.values.size());
  auto snapshot = [&] {
    auto rec = moments(grid, state, traj.target);
    if (options.observer) options.observer(state, rec);
    traj.records.push_back(std::move(rec));
    if (options.keep_states) traj.snapshots.push_back(state);
  };

  snapshot();
  const std::size_t steps = config.step_count();
  for (std::size_t i = 1; i <= steps; ++i) {
    double min_value = 0.0;
    std::size_t clamped = 0;
    try {
      clamped = euler_update(tables, state.values, rate, config.dt, config.negativity_policy, min_value);
    } catch (const NegativityDetected& e) {
      throw NegativityDetected("step " + std::to_string(i) + ": " + e.what(), i, e.min_value());
    }
    state.time = initial.time + static_cast<double>(i) * config.dt;
    if (clamped > 0) traj.negativity_events.push_back({i, state.time, clamped, min_value});
    if (i % config.snapshot_stride == 0 || i == steps) snapshot();
  }
  traj.steps = steps;
  return traj;
}

}  // namespace myxo
