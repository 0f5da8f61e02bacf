#include "myxo/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "myxo/errors.hpp"

namespace myxo {

using std::numbers::pi;

AtomicMeasure EquilibriumTarget::as_measure() const {
  return AtomicMeasure{{{wrap_angle(phi_plus), rho_plus}, {wrap_angle(phi_plus - pi), rho_minus}}};
}

MomentRecord moments(const AngularGrid& grid, const DistributionState& state,
                     const std::optional<EquilibriumTarget>& target) {
  const auto& f = state.values;
  if (f.size() != grid.size()) throw GridMismatch("state does not live on the grid");
  const double dphi = grid.dphi();

  MomentRecord r;
  r.time = state.time;
  double mass = 0.0, ux = 0.0, uy = 0.0, first = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double phi = grid.angle(k);
    mass += f[k];
    ux += std::cos(phi) * f[k];
    uy += std::sin(phi) * f[k];
    first += phi * f[k];
  }
  r.total_mass = mass * dphi;
  r.first_moment = first * dphi;
  if (r.total_mass > 0.0) r.mean_velocity = {ux * dphi / r.total_mass, uy * dphi / r.total_mass};

  const auto g = group_moments(grid, f);
  r.rho_plus = g.rho_plus;
  r.rho_minus = g.rho_minus;
  r.out_of_group_mass = g.rho_outside;
  r.phibar_plus = g.mean_plus;
  r.phibar_minus = g.mean_minus;

  if (!target) return r;

  double v = 0.0, m1 = 0.0;
  const double phi_minus = target->phi_plus - pi;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Group gk = grid.group_of(k);
    if (gk == Group::Neither || f[k] == 0.0) continue;
    const double d = circular_difference(grid.angle(k), gk == Group::Plus ? target->phi_plus : phi_minus);
    v += d * d * f[k];
    m1 += std::fabs(d) * f[k];
  }
  r.variance = v * dphi;
  r.m1 = m1 * dphi;

  const double total = g.rho_plus + g.rho_minus + g.rho_outside;
  if (g.rho_outside <= 1e-12 * total) {
    const auto finf = target->as_measure();
    try {
      const auto w2 = w2_two_group(grid, state, finf);
      const auto lyap = lyapunov(grid, state, finf);
      r.w2_to_equilibrium = w2;
      r.w2_to_partial = std::sqrt(lyap.w2_f_fbar_sq);
      r.lyapunov_H = lyap.H;
    } catch (const MassMismatch&) {
      // group masses drifted away from the target (e.g. after clamping)
    }
  }
  return r;
}

double maxwellian_variance_reference(double V0, double rho_plus, double t) {
  return V0 * std::exp(-t * rho_plus / 2.0);
}

HaffBounds haff_bounds(double V0, double M1_0, double rho_plus, double t) {
  if (V0 <= 0.0 || M1_0 <= 0.0 || rho_plus < 0.0 || t < 0.0) {
    throw InvalidArgument("haff_bounds requires V0 > 0, M1_0 > 0, rho+ >= 0, t >= 0");
  }
  const double kappa = std::sqrt(rho_plus) / (4.0 * pi);
  HaffBounds b;
  const double l = 1.0 / M1_0 + 2.0 * t;
  b.lower = 1.0 / (rho_plus * l * l);
  const double u = 1.0 / std::sqrt(V0) + kappa * t;
  b.upper = 1.0 / (u * u);
  return b;
}

namespace {

FitResult fit_log_linear(std::span<const double> t, std::span<const double> y, FitWindow window, bool log_x) {
  if (t.size() != y.size()) throw InvalidArgument("series lengths differ");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t_min || t[i] > window.t_max) continue;
    if (!(y[i] > 0.0)) throw FitError("non-positive value in fit window at t=" + std::to_string(t[i]));
    if (log_x && !(t[i] > 0.0)) throw FitError("power fit needs t > 0");
    xs.push_back(log_x ? std::log(t[i]) : t[i]);
    ys.push_back(std::log(y[i]));
  }
  if (xs.size() < 3) throw FitError("fewer than 3 points in fit window");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw FitError("degenerate fit window");
  const double slope = sxy / sxx;

  FitResult r;
  r.points = xs.size();
  r.intercept = my - slope * mx;
  r.value = slope;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (r.intercept + slope * xs[i]);
    ss += e * e;
    r.max_abs_residual = std::max(r.max_abs_residual, std::fabs(e));
  }
  r.residual_rms = std::sqrt(ss / n);
  return r;
}

}  // namespace

FitResult fit_exponential(std::span<const double> t, std::span<const double> y, FitWindow window) {
  auto r = fit_log_linear(t, y, window, false);
  r.value = -r.value;
  return r;
}

FitResult fit_power(std::span<const double> t, std::span<const double> y, FitWindow window) {
  return fit_log_linear(t, y, window, true);
}

}  // namespace myxo
