#include "myxo/collision_kernel.hpp"

#include <cmath>
#include <string>

#include "myxo/errors.hpp"

namespace myxo {

namespace {

// Neumaier variant of Kahan summation.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + c; }
};

void check_grid(const KernelTables& tables, std::size_t count) {
  if (count != tables.grid().size()) {
    throw GridMismatch("state has " + std::to_string(count) + " values, grid has " +
                       std::to_string(tables.grid().size()) + " points");
  }
}

// Periodic copy of f over indices [-N, 2N), addressed through an offset of N.
struct Padded {
  std::vector<double>& buf;
  std::size_t N;
  Padded(std::vector<double>& storage, std::span<const double> f) : buf(storage), N(f.size()) {
    buf.resize(3 * N);
    for (std::size_t r = 0; r < 3; ++r) {
      std::copy(f.begin(), f.end(), buf.begin() + static_cast<std::ptrdiff_t>(r * N));
    }
  }
  const double* at(std::size_t k) const noexcept { return buf.data() + N + k; }
};

void alignment_rows(const KernelTables& t, const Padded& p, std::span<double> out) {
  const auto offs = t.alignment_offsets();
  const auto w = t.alignment_weights();
  const double pref = t.alignment_prefactor();
  const std::size_t N = p.N;
  const std::size_t m = offs.size();
  for (std::size_t k = 0; k < N; ++k) {
    const double* fk = p.at(k);
    const double f0 = *fk;
    if (t.compensated()) {
      CompensatedSum acc;
      for (std::size_t i = 0; i < m; ++i) {
        const long long s = offs[i];
        acc.add(w[i] * (fk[-s] * fk[s] - f0 * fk[2 * s]));
      }
      out[k] = pref * acc.value();
    } else {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const long long s = offs[i];
        acc += w[i] * (fk[-s] * fk[s] - f0 * fk[2 * s]);
      }
      out[k] = pref * acc;
    }
  }
}

// Reversal row k factors as f_{k+n} C_{k+n} - f_k C_k with the weighted
// neighbourhood sum C_j = sum_d b_d f_{j+d}; the offset set is the same for
// every row.
void reversal_rows(const KernelTables& t, const Padded& p, std::span<double> out,
                   std::vector<double>& conv) {
  const auto offs = t.reversal_offsets();
  const auto w = t.reversal_weights();
  const double pref = t.reversal_prefactor();
  const std::size_t N = p.N;
  const std::size_t n = N / 2;
  const std::size_t m = offs.size();
  conv.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double* fj = p.at(j);
    if (t.compensated()) {
      CompensatedSum acc;
      for (std::size_t i = 0; i < m; ++i) acc.add(w[i] * fj[offs[i]]);
      conv[j] = acc.value();
    } else {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += w[i] * fj[offs[i]];
      conv[j] = acc;
    }
  }
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t kr = (k + n) % N;
    out[k] = pref * (*p.at(kr) * conv[kr] - *p.at(k) * conv[k]);
  }
}

thread_local std::vector<double> tl_padded;
thread_local std::vector<double> tl_conv;
thread_local std::vector<double> tl_rev;

}  // namespace

double cross_section_weight(CrossSection cs, double phi, double phi_star) noexcept {
  switch (cs) {
    case CrossSection::Maxwellian:
      return 1.0;
    case CrossSection::Rod:
      return std::fabs(std::sin(phi - phi_star));
  }
  return 0.0;
}

std::string_view to_string(CrossSection cs) noexcept {
  return cs == CrossSection::Maxwellian ? "maxwellian" : "rod";
}

CrossSection cross_section_from_string(std::string_view name) {
  if (name == "maxwellian") return CrossSection::Maxwellian;
  if (name == "rod") return CrossSection::Rod;
  throw InvalidArgument("unknown cross section '" + std::string(name) + "' (expected maxwellian or rod)");
}

double total_mass(const AngularGrid& grid, std::span<const double> values) noexcept {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dphi();
}

KernelTables::KernelTables(AngularGrid grid, CrossSection cs, bool compensated)
    : grid_(std::move(grid)), cs_(cs), compensated_(compensated) {
  const long long n = grid_.n();
  const double dphi = grid_.dphi();
  for (long long s = -n; s <= n; ++s) {
    if (4 * std::llabs(s) < n) {
      align_offsets_.push_back(s);
      // phi_{2k-k*} - phi_{k*} = -2 s dphi
      align_weights_.push_back(cross_section_weight(cs, -2.0 * s * dphi, 0.0));
    }
  }
  for (long long d = -n + 1; d <= n; ++d) {
    if (2 * std::llabs(d) > n) {
      rev_offsets_.push_back(d);
      rev_weights_.push_back(cross_section_weight(cs, 0.0, d * dphi));
    }
  }
}

KernelTables build_tables(const AngularGrid& grid, CrossSection cs, bool compensated) {
  return KernelTables(grid, cs, compensated);
}

std::vector<double> apply_alignment(const KernelTables& tables, const DistributionState& state) {
  check_grid(tables, state.values.size());
  std::vector<double> out(state.values.size());
  const Padded p(tl_padded, state.values);
  alignment_rows(tables, p, out);
  return out;
}

std::vector<double> apply_reversal(const KernelTables& tables, const DistributionState& state) {
  check_grid(tables, state.values.size());
  std::vector<double> out(state.values.size());
  const Padded p(tl_padded, state.values);
  reversal_rows(tables, p, out, tl_conv);
  return out;
}

void apply_into(const KernelTables& tables, std::span<const double> f, std::span<double> out) {
  check_grid(tables, f.size());
  check_grid(tables, out.size());
  const Padded p(tl_padded, f);
  tl_rev.resize(f.size());
  alignment_rows(tables, p, out);
  reversal_rows(tables, p, tl_rev, tl_conv);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += tl_rev[k];
}

std::vector<double> apply(const KernelTables& tables, const DistributionState& state) {
  std::vector<double> out(state.values.size());
  apply_into(tables, state.values, out);
  return out;
}

}  // namespace myxo
