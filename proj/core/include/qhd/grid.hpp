#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace qhd {

inline constexpr std::size_t kMaxDefaultRank = 4;

enum class RankPolicy { capped, allow_high_rank };

/// Periodic Cartesian grid over the n-particle configuration space.
///
/// Axis `a` belongs to particle `a / dims_per_particle`. Data laid out on the
/// grid is row-major (last axis fastest). Coordinates run over
/// [-L/2, L/2) along every axis, so x_j = -L/2 + j*h.
class LatticeGrid {
 public:
  LatticeGrid(std::size_t n_particles, std::size_t dims_per_particle,
              std::vector<std::size_t> points, std::vector<double> lengths,
              RankPolicy policy = RankPolicy::capped);

  /// Same point count and box length on every axis.
  static LatticeGrid cubic(std::size_t n_particles, std::size_t dims_per_particle,
                           std::size_t points, double length,
                           RankPolicy policy = RankPolicy::capped);

  std::size_t n_particles() const noexcept { return n_particles_; }
  std::size_t dims_per_particle() const noexcept { return dims_per_particle_; }
  std::size_t rank() const noexcept { return points_.size(); }
  std::size_t size() const noexcept { return size_; }

  std::size_t points(std::size_t axis) const { return points_.at(axis); }
  double length(std::size_t axis) const { return lengths_.at(axis); }
  double spacing(std::size_t axis) const { return lengths_.at(axis) / double(points_.at(axis)); }
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }
  const std::vector<std::size_t>& shape() const noexcept { return points_; }
  const std::vector<double>& lengths() const noexcept { return lengths_; }

  double cell_volume() const noexcept { return cell_volume_; }
  double volume() const noexcept;
  double min_spacing() const noexcept;

  /// Coordinate of grid index `i` along `axis`.
  double coordinate(std::size_t axis, std::size_t i) const {
    return -0.5 * lengths_[axis] + double(i) * spacing(axis);
  }

  /// Index along `axis` of the flat (row-major) index.
  std::size_t index_along(std::size_t flat, std::size_t axis) const {
    return (flat / strides_[axis]) % points_[axis];
  }

  /// Coordinates of a flat index, written to `out` (size rank()).
  void coordinates(std::size_t flat, std::span<double> out) const;

  /// First axis owned by particle i; the block spans dims_per_particle() axes.
  std::size_t block_begin(std::size_t particle) const { return particle * dims_per_particle_; }
  std::size_t particle_of_axis(std::size_t axis) const { return axis / dims_per_particle_; }

  friend bool operator==(const LatticeGrid&, const LatticeGrid&) = default;

 private:
  std::size_t n_particles_;
  std::size_t dims_per_particle_;
  std::vector<std::size_t> points_;
  std::vector<double> lengths_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Discrete integral over the torus: sum(f) * cell volume.
double integrate(const LatticeGrid& grid, std::span<const double> f);

}  // namespace qhd
