#include "myxo/angular_grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "myxo/errors.hpp"

namespace myxo {

using std::numbers::pi;

AngularGrid::AngularGrid(int n) : n_(n), dphi_(0.0) {
  if (n < 3 || n % 2 == 0) {
    throw InvalidArgument("angular grid requires odd n >= 3 (even n puts grid pairs exactly pi/2 apart), got n=" +
                          std::to_string(n));
  }
  dphi_ = pi / n;
  angles_.resize(2 * static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < angles_.size(); ++k) {
    angles_[k] = (static_cast<double>(k) - n) * pi / n;
  }
}

std::size_t AngularGrid::wrap(long long k) const noexcept {
  const long long m = 2LL * n_;
  long long r = k % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

std::size_t AngularGrid::index_distance(std::size_t k, std::size_t k_star) const noexcept {
  const std::size_t d = k > k_star ? k - k_star : k_star - k;
  return std::min(d, size() - d);
}

long long AngularGrid::signed_offset(std::size_t from, std::size_t to) const noexcept {
  long long d = static_cast<long long>(to) - static_cast<long long>(from);
  const long long m = 2LL * n_;
  d %= m;
  if (d > n_) d -= m;
  if (d <= -n_) d += m;
  return d;
}

std::size_t AngularGrid::reversal_partner(std::size_t k) const noexcept {
  return (k + static_cast<std::size_t>(n_)) % size();
}

Group AngularGrid::group_of(std::size_t k) const noexcept {
  // phi_k in (pi/4, 3pi/4)  <=>  n < 4(k - n) < 3n
  const long long q = 4 * (static_cast<long long>(k) - n_);
  if (q > n_ && q < 3LL * n_) return Group::Plus;
  if (q < -n_ && q > -3LL * n_) return Group::Minus;
  return Group::Neither;
}

std::optional<std::size_t> AngularGrid::alignment_midpoint(std::size_t j, std::size_t m) const noexcept {
  const long long d = signed_offset(j, m);
  if (d % 2 != 0) return std::nullopt;
  if (std::llabs(d) >= n_) return std::nullopt;
  return wrap(static_cast<long long>(j) + d / 2);
}

std::size_t AngularGrid::nearest_index(double phi) const noexcept {
  const double x = wrap_angle(phi) / dphi_ + n_;
  return wrap(std::llround(x));
}

std::size_t AngularGrid::group_count(Group g) const noexcept {
  std::size_t c = 0;
  for (std::size_t k = 0; k < size(); ++k) c += group_of(k) == g;
  return c;
}

AngularGrid build_grid(int n) { return AngularGrid(n); }

double wrap_angle(double phi) noexcept {
  double r = std::fmod(phi + pi, 2 * pi);
  if (r < 0) r += 2 * pi;
  r -= pi;
  return r >= pi ? -pi : r;
}

double circular_difference(double a, double b) noexcept {
  double d = std::remainder(a - b, 2 * pi);
  if (d <= -pi) d += 2 * pi;
  return d;
}

double circular_distance(double a, double b) noexcept { return std::fabs(circular_difference(a, b)); }

bool angle_in_group(double phi, Group g) noexcept {
  const double x = wrap_angle(phi);
  switch (g) {
    case Group::Plus:
      return x > pi / 4 && x < 3 * pi / 4;
    case Group::Minus:
      return x < -pi / 4 && x > -3 * pi / 4;
    case Group::Neither:
      return !angle_in_group(x, Group::Plus) && !angle_in_group(x, Group::Minus);
  }
  return false;
}

}  // namespace myxo
