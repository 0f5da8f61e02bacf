#include "myxo/macro_limit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "myxo/errors.hpp"

namespace myxo {

void MacroState1D::validate() const {
  if (!(length > 0.0)) throw InvalidArgument("macro domain length must be > 0");
  if (cells() == 0) throw InvalidArgument("macro state has no cells");
  if (rho_minus.size() != cells() || phi_plus.size() != cells()) {
    throw InvalidArgument("macro state arrays differ in length");
  }
  for (std::size_t i = 0; i < cells(); ++i) {
    if (!(rho_plus[i] >= 0.0) || !(rho_minus[i] >= 0.0)) {
      throw InvalidArgument("negative density in macro cell " + std::to_string(i));
    }
  }
}

ConservativeVars conservative_vars(const MacroState1D& state) {
  ConservativeVars v;
  v.q_plus = state.rho_plus;
  v.q_minus = state.rho_minus;
  v.q_angle.resize(state.cells());
  for (std::size_t i = 0; i < state.cells(); ++i) {
    v.q_angle[i] = (state.rho_plus[i] + state.rho_minus[i]) * state.phi_plus[i];
  }
  return v;
}

MacroState1D primitive_vars(const ConservativeVars& vars, double length, double time) {
  MacroState1D s;
  s.length = length;
  s.time = time;
  s.rho_plus = vars.q_plus;
  s.rho_minus = vars.q_minus;
  s.phi_plus.resize(vars.q_plus.size());
  for (std::size_t i = 0; i < s.phi_plus.size(); ++i) {
    const double rho = vars.q_plus[i] + vars.q_minus[i];
    if (!(rho > 0.0)) throw VacuumError("vacuum in macro cell " + std::to_string(i) + ": phi+ is undefined");
    s.phi_plus[i] = vars.q_angle[i] / rho;
  }
  return s;
}

std::array<double, 3> char_speeds(const MacroState1D& state, std::size_t cell) {
  const double rp = state.rho_plus.at(cell);
  const double rm = state.rho_minus.at(cell);
  if (!(rp + rm > 0.0)) throw VacuumError("vacuum in macro cell " + std::to_string(cell));
  const double c = std::cos(state.phi_plus[cell]);
  return {c, -c, (rp - rm) / (rp + rm) * c};
}

double max_char_speed(const MacroState1D& state) {
  double s = 0.0;
  for (double phi : state.phi_plus) s = std::max(s, std::fabs(std::cos(phi)));
  return s;
}

MacroState1D macro_step(const MacroState1D& state, double dt, const MacroOptions& options, MacroStepReport* report) {
  const std::size_t N = state.cells();
  const double dx = state.dx();
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  const double smax = max_char_speed(state);
  if (smax > 0.0 && dt * smax > options.cfl * dx * (1.0 + 1e-12)) {
    throw CflViolation("dt=" + std::to_string(dt) + " exceeds cfl*dx/max_speed=" +
                       std::to_string(options.cfl * dx / smax));
  }
  if (!options.rho_floor) {
    for (std::size_t i = 0; i < N; ++i) {
      if (!(state.rho_plus[i] + state.rho_minus[i] > 0.0)) {
        throw VacuumError("vacuum in macro cell " + std::to_string(i));
      }
    }
  }

  std::vector<double> c(N);
  for (std::size_t i = 0; i < N; ++i) c[i] = std::cos(state.phi_plus[i]);
  const auto u = conservative_vars(state);

  // Interface i+1/2 sits between cell i and cell (i+1) mod N.
  std::vector<double> f1(N), f2(N), f3(N);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t r = (i + 1) % N;
    const double alpha = std::max(std::fabs(c[i]), std::fabs(c[r]));
    const double a3l = (state.rho_plus[i] - state.rho_minus[i]) * state.phi_plus[i] * c[i];
    const double a3r = (state.rho_plus[r] - state.rho_minus[r]) * state.phi_plus[r] * c[r];
    f1[i] = 0.5 * (u.q_plus[i] * c[i] + u.q_plus[r] * c[r]) - 0.5 * alpha * (u.q_plus[r] - u.q_plus[i]);
    f2[i] = 0.5 * (-u.q_minus[i] * c[i] - u.q_minus[r] * c[r]) - 0.5 * alpha * (u.q_minus[r] - u.q_minus[i]);
    f3[i] = 0.5 * (a3l + a3r) - 0.5 * alpha * (u.q_angle[r] - u.q_angle[i]);
  }

  ConservativeVars next = u;
  const double lam = dt / dx;
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t l = (i + N - 1) % N;
    next.q_plus[i] -= lam * (f1[i] - f1[l]);
    next.q_minus[i] -= lam * (f2[i] - f2[l]);
    next.q_angle[i] -= lam * (f3[i] - f3[l]);
  }

  if (!options.rho_floor) return primitive_vars(next, state.length, state.time + dt);

  MacroState1D out;
  out.length = state.length;
  out.time = state.time + dt;
  out.rho_plus.resize(N);
  out.rho_minus.resize(N);
  out.phi_plus.resize(N);
  std::size_t floored = 0;
  for (std::size_t i = 0; i < N; ++i) {
    out.rho_plus[i] = std::max(next.q_plus[i], 0.0);
    out.rho_minus[i] = std::max(next.q_minus[i], 0.0);
    const double rho = next.q_plus[i] + next.q_minus[i];
    if (rho < *options.rho_floor || rho <= 0.0) {
      out.phi_plus[i] = state.phi_plus[i];
      ++floored;
    } else {
      out.phi_plus[i] = next.q_angle[i] / rho;
    }
  }
  if (report != nullptr) report->floored_cells = floored;
  return out;
}

MacroRun run_macro(const MacroState1D& initial, double t_end, const MacroOptions& options,
                   std::size_t snapshot_every) {
  initial.validate();
  MacroRun run;
  run.snapshots.push_back(initial);
  const double dt_full = options.cfl * initial.dx();
  MacroState1D s = initial;
  const double t0 = initial.time;
  while (s.time < t0 + t_end - 1e-12 * std::max(1.0, t_end)) {
    const double dt = std::min(dt_full, t0 + t_end - s.time);
    MacroStepReport rep;
    s = macro_step(s, dt, options, &rep);
    run.floored_cells += rep.floored_cells;
    ++run.steps;
    if (snapshot_every > 0 && run.steps % snapshot_every == 0) run.snapshots.push_back(s);
  }
  if (run.steps > 0 && run.snapshots.back().time != s.time) run.snapshots.push_back(s);
  return run;
}

double l1_moment_discrepancy(const MacroState1D& a, const MacroState1D& b) {
  if (a.cells() != b.cells()) throw InvalidArgument("macro states have different cell counts");
  double s = 0.0;
  for (std::size_t i = 0; i < a.cells(); ++i) {
    s += std::fabs(a.rho_plus[i] - b.rho_plus[i]) + std::fabs(a.rho_minus[i] - b.rho_minus[i]) +
         std::fabs(a.phi_plus[i] - b.phi_plus[i]);
  }
  return s * a.dx();
}

double total_variation_phi(const MacroState1D& state) {
  double tv = 0.0;
  const std::size_t N = state.cells();
  for (std::size_t i = 0; i < N; ++i) tv += std::fabs(state.phi_plus[(i + 1) % N] - state.phi_plus[i]);
  return tv;
}

MacroState1D sample_macro_state(std::size_t cells, double length, const std::function<double(double)>& rho_plus,
                                const std::function<double(double)>& rho_minus,
                                const std::function<double(double)>& phi_plus) {
  MacroState1D s;
  s.length = length;
  s.rho_plus.resize(cells);
  s.rho_minus.resize(cells);
  s.phi_plus.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double x = s.cell_center(i);
    s.rho_plus[i] = rho_plus(x);
    s.rho_minus[i] = rho_minus(x);
    s.phi_plus[i] = phi_plus(x);
  }
  s.validate();
  return s;
}

}  // namespace myxo
