#include "myxo/kinetic_transport_1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "myxo/errors.hpp"
#include "myxo/transport_metrics.hpp"

namespace myxo {

namespace {

void check_field(const AngularGrid& grid, const KineticField1D& field) {
  if (field.angles != grid.size()) throw GridMismatch("kinetic field does not live on the angular grid");
  if (field.cells == 0) throw InvalidArgument("kinetic field has no cells");
  if (field.values.size() != field.cells * field.angles) throw InvalidArgument("kinetic field storage size mismatch");
  if (!(field.length > 0.0)) throw InvalidArgument("kinetic domain length must be > 0");
  if (!(field.knudsen > 0.0)) throw InvalidArgument("knudsen number must be > 0");
}

}  // namespace

double kinetic_mass(const AngularGrid& grid, const KineticField1D& field) noexcept {
  double s = 0.0;
  for (double v : field.values) s += v;
  return s * field.dx() * grid.dphi();
}

KineticField1D transport_substep(const AngularGrid& grid, const KineticField1D& field, double dt) {
  check_field(grid, field);
  if (!(dt >= 0.0)) throw InvalidArgument("dt must be >= 0");
  const double dx = field.dx();
  if (dt > dx * (1.0 + 1e-12)) {
    throw CflViolation("transport dt=" + std::to_string(dt) + " exceeds dx=" + std::to_string(dx));
  }
  KineticField1D out = field;
  out.time = field.time + dt;
  const std::size_t N = field.cells;
  const std::size_t A = field.angles;
  const double lam = dt / dx;
  for (std::size_t k = 0; k < A; ++k) {
    const double c = std::cos(grid.angle(k));
    const double nu = lam * c;
    for (std::size_t i = 0; i < N; ++i) {
      const double fi = field.values[i * A + k];
      if (c >= 0.0) {
        const double fl = field.values[((i + N - 1) % N) * A + k];
        out.values[i * A + k] = fi - nu * (fi - fl);
      } else {
        const double fr = field.values[((i + 1) % N) * A + k];
        out.values[i * A + k] = fi - nu * (fr - fi);
      }
    }
  }
  return out;
}

KineticField1D collision_substep(const KernelTables& tables, const KineticField1D& field, double dt,
                                 const KineticOptions& options) {
  check_field(tables.grid(), field);
  if (!(dt >= 0.0)) throw InvalidArgument("dt must be >= 0");
  if (!(options.dt_hom > 0.0)) throw InvalidArgument("dt_hom must be > 0");
  KineticField1D out = field;
  out.time = field.time + dt;
  if (dt == 0.0) return out;
  const double tau = dt / field.knudsen;
  const auto m = static_cast<std::size_t>(std::ceil(tau / options.dt_hom - 1e-12));
  const double h = tau / static_cast<double>(std::max<std::size_t>(m, 1));
  std::vector<double> rate(field.angles);
  for (std::size_t i = 0; i < field.cells; ++i) {
    auto f = out.cell(i);
    for (std::size_t s = 0; s < std::max<std::size_t>(m, 1); ++s) {
      double min_value = 0.0;
      try {
        euler_update(tables, f, rate, h, options.negativity_policy, min_value);
      } catch (const NegativityDetected& e) {
        throw NegativityDetected("cell " + std::to_string(i) + ": " + e.what(), s + 1, e.min_value());
      }
    }
  }
  return out;
}

KineticField1D strang_step(const KernelTables& tables, const KineticField1D& field, double dt,
                           const KineticOptions& options) {
  const auto& grid = tables.grid();
  auto half = transport_substep(grid, field, 0.5 * dt);
  auto coll = collision_substep(tables, half, dt, options);
  auto out = transport_substep(grid, coll, 0.5 * dt);
  out.time = field.time + dt;
  return out;
}

MacroState1D macro_projection(const AngularGrid& grid, const KineticField1D& field) {
  check_field(grid, field);
  MacroState1D m;
  m.length = field.length;
  m.time = field.time;
  m.rho_plus.resize(field.cells);
  m.rho_minus.resize(field.cells);
  m.phi_plus.resize(field.cells);
  for (std::size_t i = 0; i < field.cells; ++i) {
    const auto g = group_moments(grid, field.cell(i));
    const double rho = g.rho_plus + g.rho_minus;
    const double total = rho + g.rho_outside;
    if (!(rho > 0.0) || g.rho_outside >= 0.01 * total) {
      throw NotTwoGroup("cell " + std::to_string(i) + " is not two-group dominated (outside mass " +
                        std::to_string(g.rho_outside) + " of " + std::to_string(total) + ")");
    }
    m.rho_plus[i] = g.rho_plus;
    m.rho_minus[i] = g.rho_minus;
    m.phi_plus[i] = (g.rho_plus * g.mean_plus + g.rho_minus * (g.mean_minus + std::numbers::pi)) / rho;
  }
  return m;
}

KineticField1D equilibrium_field(const AngularGrid& grid, const MacroState1D& macro, double knudsen) {
  macro.validate();
  if (!(knudsen > 0.0)) throw InvalidArgument("knudsen number must be > 0");
  KineticField1D f;
  f.length = macro.length;
  f.cells = macro.cells();
  f.angles = grid.size();
  f.values.assign(f.cells * f.angles, 0.0);
  f.knudsen = knudsen;
  f.time = macro.time;
  const double dphi = grid.dphi();
  const int n = grid.n();
  for (std::size_t i = 0; i < f.cells; ++i) {
    const double phi = macro.phi_plus[i];
    const double pos = phi / dphi + n;
    const int k0 = static_cast<int>(std::floor(pos));
    const double w = pos - k0;
    const int k1 = k0 + 1;
    if (grid.group_of(grid.wrap(k0)) != Group::Plus || grid.group_of(grid.wrap(k1)) != Group::Plus) {
      throw InvalidArgument("phi+ = " + std::to_string(phi) + " in cell " + std::to_string(i) +
                            " is not inside the Plus arc");
    }
    auto c = f.cell(i);
    const auto put = [&](long long k, double mass) { c[grid.wrap(k)] += mass / dphi; };
    put(k0, macro.rho_plus[i] * (1.0 - w));
    put(k1, macro.rho_plus[i] * w);
    put(grid.reversal_partner(grid.wrap(k0)), macro.rho_minus[i] * (1.0 - w));
    put(grid.reversal_partner(grid.wrap(k1)), macro.rho_minus[i] * w);
  }
  return f;
}

KineticRun run_kinetic(const KernelTables& tables, const KineticField1D& initial, double t_end,
                       const KineticOptions& options, std::size_t snapshot_every) {
  check_field(tables.grid(), initial);
  if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be >= 0");
  if (!(options.cfl > 0.0 && options.cfl <= 1.0)) throw InvalidArgument("kinetic cfl must lie in (0, 1]");
  KineticRun run;
  run.snapshots.push_back(initial);
  const double dt_full = options.cfl * initial.dx();
  KineticField1D s = initial;
  const double t0 = initial.time;
  while (s.time < t0 + t_end - 1e-12 * std::max(1.0, t_end)) {
    const double dt = std::min(dt_full, t0 + t_end - s.time);
    s = strang_step(tables, s, dt, options);
    ++run.steps;
    if (snapshot_every > 0 && run.steps % snapshot_every == 0) run.snapshots.push_back(s);
  }
  if (run.steps > 0 && run.snapshots.back().time != s.time) run.snapshots.push_back(s);
  return run;
}

}  // namespace myxo
