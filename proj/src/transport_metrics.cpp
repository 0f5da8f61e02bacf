#include "myxo/transport_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "myxo/errors.hpp"

namespace myxo {

using std::numbers::pi;

namespace {

constexpr double kMassRelTol = 1e-9;
constexpr double kLeakRelTol = 1e-12;

bool masses_match(double a, double b) noexcept {
  return std::fabs(a - b) <= kMassRelTol * std::max(std::fabs(a), std::fabs(b));
}

void require_two_group(const GroupMoments& g) {
  const double total = g.rho_plus + g.rho_minus + g.rho_outside;
  if (g.rho_outside > kLeakRelTol * total) {
    throw NotTwoGroup("state has mass " + std::to_string(g.rho_outside) + " outside the two groups (total " +
                      std::to_string(total) + ")");
  }
}

std::vector<double> restrict_to(const AngularGrid& grid, std::span<const double> values, Group g) {
  std::vector<double> r(values.size(), 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (grid.group_of(k) == g) r[k] = values[k];
  }
  return r;
}

// Per-group squared distance to the group's atom of `target`.
double group_cost(const AngularGrid& grid, std::span<const double> values, Group g, const AtomicMeasure& target) {
  const Atom* atom = nullptr;
  for (const auto& a : target.atoms) {
    if (angle_in_group(a.angle, g)) {
      if (atom != nullptr) throw InvalidArgument("target has more than one atom in a group");
      atom = &a;
    }
  }
  const auto restricted = restrict_to(grid, values, g);
  const double mass = total_mass(grid, restricted);
  if (atom == nullptr) {
    if (mass == 0.0) return 0.0;
    throw MassMismatch("target has no atom for a group carrying mass " + std::to_string(mass));
  }
  const double w = w2_to_point_mass(grid, restricted, atom->angle, atom->mass);
  return w * w;
}

}  // namespace

double AtomicMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}

AtomicMeasure to_atomic(const AngularGrid& grid, std::span<const double> values) {
  AtomicMeasure m;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > 0.0) m.atoms.push_back({grid.angle(k), values[k] * grid.dphi()});
  }
  return m;
}

GroupMoments group_moments(const AngularGrid& grid, std::span<const double> values) noexcept {
  GroupMoments g;
  double sp = 0.0;
  double sm = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    switch (grid.group_of(k)) {
      case Group::Plus:
        g.rho_plus += values[k];
        sp += grid.angle(k) * values[k];
        break;
      case Group::Minus:
        g.rho_minus += values[k];
        sm += grid.angle(k) * values[k];
        break;
      case Group::Neither:
        g.rho_outside += values[k];
        break;
    }
  }
  g.mean_plus = g.rho_plus > 0.0 ? sp / g.rho_plus : pi / 2;
  g.mean_minus = g.rho_minus > 0.0 ? sm / g.rho_minus : -pi / 2;
  g.rho_plus *= grid.dphi();
  g.rho_minus *= grid.dphi();
  g.rho_outside *= grid.dphi();
  return g;
}

double w2_to_point_mass(const AngularGrid& grid, std::span<const double> restricted_values, double target_angle,
                        double target_mass) {
  double mass = 0.0;
  double cost = 0.0;
  for (std::size_t k = 0; k < restricted_values.size(); ++k) {
    const double f = restricted_values[k];
    if (f == 0.0) continue;
    const double d = circular_distance(grid.angle(k), target_angle);
    mass += f;
    cost += d * d * f;
  }
  mass *= grid.dphi();
  if (!masses_match(mass, target_mass)) {
    throw MassMismatch("restricted mass " + std::to_string(mass) + " differs from target mass " +
                       std::to_string(target_mass));
  }
  return std::sqrt(cost * grid.dphi());
}

AtomicMeasure partial_equilibrium(const AngularGrid& grid, const DistributionState& state) {
  const auto g = group_moments(grid, state.values);
  require_two_group(g);
  return AtomicMeasure{{{g.mean_plus, g.rho_plus}, {g.mean_minus, g.rho_minus}}};
}

double w2_two_group(const AngularGrid& grid, const DistributionState& state, const AtomicMeasure& target) {
  return std::sqrt(group_cost(grid, state.values, Group::Plus, target) +
                   group_cost(grid, state.values, Group::Minus, target));
}

LyapunovRecord lyapunov(const AngularGrid& grid, const DistributionState& state, const AtomicMeasure& target_finf,
                        double gamma) {
  const auto g = group_moments(grid, state.values);
  require_two_group(g);
  double target_plus = 0.0;
  double target_minus = 0.0;
  for (const auto& a : target_finf.atoms) {
    if (angle_in_group(a.angle, Group::Plus)) target_plus += a.mass;
    else if (angle_in_group(a.angle, Group::Minus)) target_minus += a.mass;
    else if (a.mass > 0.0) throw InvalidArgument("equilibrium target has an atom outside the groups");
  }
  if (!masses_match(g.rho_plus, target_plus) || !masses_match(g.rho_minus, target_minus)) {
    throw MassMismatch("group masses (" + std::to_string(g.rho_plus) + ", " + std::to_string(g.rho_minus) +
                       ") do not match the equilibrium target");
  }

  LyapunovRecord r;
  r.gamma = gamma;
  double cost = 0.0;
  for (std::size_t k = 0; k < state.values.size(); ++k) {
    const Group gk = grid.group_of(k);
    if (gk == Group::Neither) continue;
    const double d = grid.angle(k) - (gk == Group::Plus ? g.mean_plus : g.mean_minus);
    cost += d * d * state.values[k];
  }
  r.w2_f_fbar_sq = cost * grid.dphi();

  const double rho = g.rho_plus + g.rho_minus;
  if (rho > 0.0) {
    double diff = std::fmod(g.mean_plus - g.mean_minus, 2 * pi);
    if (diff < 0.0) diff += 2 * pi;
    const double e = diff - pi;
    r.w2_fbar_finf_sq = g.rho_plus * g.rho_minus / rho * e * e;
  }
  r.H = r.w2_f_fbar_sq + gamma * r.w2_fbar_finf_sq;
  r.lambda = std::min(g.rho_plus, g.rho_minus) / 4.0;
  return r;
}

double w2_circle_general(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  const double m = mu.total_mass();
  const double m_nu = nu.total_mass();
  if (!masses_match(m, m_nu)) {
    throw MassMismatch("measures have different total mass: " + std::to_string(m) + " vs " + std::to_string(m_nu));
  }
  if (m <= 0.0) return 0.0;

  auto prepare = [](const AtomicMeasure& a, double scale, std::vector<double>& angles, std::vector<double>& cum) {
    std::vector<Atom> atoms;
    for (const auto& x : a.atoms) {
      if (x.mass < 0.0) throw InvalidArgument("atomic measure has negative mass");
      if (x.mass > 0.0) atoms.push_back({wrap_angle(x.angle), x.mass * scale});
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.angle < r.angle; });
    angles.clear();
    cum.assign(1, 0.0);
    for (const auto& x : atoms) {
      angles.push_back(x.angle);
      cum.push_back(cum.back() + x.mass);
    }
  };
  std::vector<double> xa, ca, ya, cb;
  prepare(mu, 1.0, xa, ca);
  prepare(nu, m / m_nu, ya, cb);
  const double total = ca.back();
  cb.back() = total;

  // Couplings t -> (F^-1(t), G^-1(t + theta mod total)); the cost is piecewise
  // linear in theta with kinks where quantile boundaries of the two measures
  // coincide, so the minimum is attained at one of those shifts.
  auto locate = [](const std::vector<double>& cum, double t) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), t);
    auto i = static_cast<std::size_t>(it - cum.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, cum.size() - 2);
  };
  auto reduce = [total](double t) {
    double r = std::fmod(t, total);
    if (r < 0.0) r += total;
    return r;
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> cuts;
  for (std::size_t i = 0; i + 1 < ca.size(); ++i) {
    for (std::size_t j = 0; j + 1 < cb.size(); ++j) {
      const double theta = reduce(cb[j] - ca[i]);
      cuts.assign(ca.begin(), ca.end());
      for (std::size_t q = 0; q + 1 < cb.size(); ++q) cuts.push_back(reduce(cb[q] - theta));
      std::sort(cuts.begin(), cuts.end());
      double cost = 0.0;
      for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
        const double len = cuts[q + 1] - cuts[q];
        if (len <= 0.0) continue;
        const double mid = 0.5 * (cuts[q] + cuts[q + 1]);
        const double d = circular_distance(xa[locate(ca, mid)], ya[locate(cb, reduce(mid + theta))]);
        cost += len * d * d;
      }
      best = std::min(best, cost);
    }
  }
  return std::sqrt(best);
}

}  // namespace myxo
