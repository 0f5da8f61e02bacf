#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace myxo {

enum class Group { Plus, Minus, Neither };

/// Periodic lattice of 2n equidistant directions phi_k = (k - n) * pi / n,
/// k = 0 .. 2n-1, covering the fundamental domain [-pi, pi). n must be odd
/// so that no two grid directions are exactly pi/2 apart.
///
/// All index arithmetic is modulo 2n. The groups are the open arcs
/// Plus = (pi/4, 3pi/4) and Minus = (-3pi/4, -pi/4); membership is decided
/// in exact integer arithmetic.
class AngularGrid {
 public:
  explicit AngularGrid(int n);

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return angles_.size(); }
  double dphi() const noexcept { return dphi_; }
  double angle(std::size_t k) const { return angles_[k]; }
  std::span<const double> angles() const noexcept { return angles_; }

  /// Reduces any signed index into [0, 2n).
  std::size_t wrap(long long k) const noexcept;

  /// Periodic index distance min(|k - k*|, 2n - |k - k*|), in [0, n].
  std::size_t index_distance(std::size_t k, std::size_t k_star) const noexcept;

  /// Signed shortest offset from `from` to `to`, in (-n, n].
  long long signed_offset(std::size_t from, std::size_t to) const noexcept;

  /// (k + n) mod 2n.
  std::size_t reversal_partner(std::size_t k) const noexcept;

  Group group_of(std::size_t k) const noexcept;

  /// Grid midpoint on the short arc between j and m if the pair can align
  /// onto the grid (even offset, not antipodal); std::nullopt otherwise.
  std::optional<std::size_t> alignment_midpoint(std::size_t j, std::size_t m) const noexcept;

  /// Index of the grid direction closest to `phi` (any real angle).
  std::size_t nearest_index(double phi) const noexcept;

  /// Number of grid indices in the given group.
  std::size_t group_count(Group g) const noexcept;

  bool operator==(const AngularGrid& other) const noexcept { return n_ == other.n_; }

 private:
  int n_;
  double dphi_;
  std::vector<double> angles_;
};

AngularGrid build_grid(int n);

/// Shortest circular distance in [0, pi].
double circular_distance(double a, double b) noexcept;

/// Signed shortest circular difference a - b, in (-pi, pi].
double circular_difference(double a, double b) noexcept;

/// Reduces an angle into [-pi, pi).
double wrap_angle(double phi) noexcept;

/// True if `phi` lies in the open arc of the group (continuous membership).
bool angle_in_group(double phi, Group g) noexcept;

}  // namespace myxo
