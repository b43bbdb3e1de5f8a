#include "qhd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qhd/error.hpp"

namespace qhd {

LatticeGrid::LatticeGrid(std::size_t n_particles, std::size_t dims_per_particle,
                         std::vector<std::size_t> points, std::vector<double> lengths,
                         RankPolicy policy)
    : n_particles_(n_particles),
      dims_per_particle_(dims_per_particle),
      points_(std::move(points)),
      lengths_(std::move(lengths)) {
  if (n_particles_ == 0) throw ValidationError("grid: n_particles must be >= 1");
  if (dims_per_particle_ < 1 || dims_per_particle_ > 3)
    throw ValidationError("grid: dims_per_particle must be 1, 2 or 3");
  const std::size_t rank = n_particles_ * dims_per_particle_;
  if (points_.size() != rank || lengths_.size() != rank)
    throw ValidationError("grid: points/lengths must list " + std::to_string(rank) + " axes");
  if (rank > kMaxDefaultRank && policy != RankPolicy::allow_high_rank)
    throw ValidationError("grid: rank " + std::to_string(rank) +
                          " exceeds the desk-scale cap of 4 (set allow_high_rank)");
  for (std::size_t a = 0; a < rank; ++a) {
    if (points_[a] < 8 || points_[a] % 2 != 0)
      throw ValidationError("grid: points per axis must be even and >= 8");
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a]))
      throw ValidationError("grid: box lengths must be positive and finite");
  }
  strides_.assign(rank, 1);
  for (std::size_t a = rank; a-- > 1;) strides_[a - 1] = strides_[a] * points_[a];
  size_ = strides_[0] * points_[0];
  cell_volume_ = 1.0;
  for (std::size_t a = 0; a < rank; ++a) cell_volume_ *= spacing(a);
  if (!(cell_volume_ > 0.0)) throw ValidationError("grid: cell volume underflow");
}

LatticeGrid LatticeGrid::cubic(std::size_t n_particles, std::size_t dims_per_particle,
                               std::size_t points, double length, RankPolicy policy) {
  const std::size_t rank = n_particles * dims_per_particle;
  return LatticeGrid(n_particles, dims_per_particle, std::vector<std::size_t>(rank, points),
                     std::vector<double>(rank, length), policy);
}

double LatticeGrid::volume() const noexcept {
  return std::accumulate(lengths_.begin(), lengths_.end(), 1.0, std::multiplies<>());
}

double LatticeGrid::min_spacing() const noexcept {
  double h = spacing(0);
  for (std::size_t a = 1; a < rank(); ++a) h = std::min(h, spacing(a));
  return h;
}

void LatticeGrid::coordinates(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = 0; a < rank(); ++a) out[a] = coordinate(a, index_along(flat, a));
}

double integrate(const LatticeGrid& grid, std::span<const double> f) {
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum * grid.cell_volume();
}

}  // namespace qhd
