#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qhd/grid.hpp"

namespace qhd {

/// V_ex(x_i) for one particle's d coordinates.
using ExternalPotential = std::function<double(std::span<const double>)>;
/// V_in(r) for the distance between two particles.
using PairPotential = std::function<double(double)>;

/// External plus pairwise potential of the n-particle system,
/// V(x) = sum_i V_ex(x_i) + sum_{i<j} V_in(|x_i - x_j|),
/// with distances taken by minimum image on the torus.
class PotentialSpec {
 public:
  PotentialSpec() = default;

  /// V_ex = 1/2 m omega^2 |x - center|^2 (center defaults to the origin).
  static PotentialSpec harmonic(double mass, double omega, std::vector<double> center = {});

  PotentialSpec& with_external(ExternalPotential f, std::string label = "custom");
  PotentialSpec& with_pairwise(PairPotential f, std::string label = "custom");

  bool has_external() const noexcept { return bool(external_); }
  bool has_pairwise() const noexcept { return bool(pairwise_); }
  const std::string& external_label() const noexcept { return external_label_; }
  const std::string& pairwise_label() const noexcept { return pairwise_label_; }

  double external_at(std::span<const double> x) const { return external_ ? external_(x) : 0.0; }
  double pair_at(double r) const { return pairwise_ ? pairwise_(r) : 0.0; }

  /// Total V sampled on the grid.
  std::vector<double> sample(const LatticeGrid& grid) const;
  /// V_i = V_ex(x_i) + 1/2 sum_{j != i} V_in(|x_i - x_j|); sum_i V_i = V.
  std::vector<double> sample_particle(const LatticeGrid& grid, std::size_t particle) const;

 private:
  double particle_term(const LatticeGrid& grid, std::span<const double> x, std::size_t i) const;

  ExternalPotential external_;
  PairPotential pairwise_;
  std::string external_label_ = "none";
  std::string pairwise_label_ = "none";
};

/// Periodic piecewise-linear interpolant through (x_k, v_k) samples of a 1D
/// potential on a box of length `period`.
ExternalPotential tabulated_external(std::vector<double> xs, std::vector<double> vs, double period);
/// Piecewise-linear V_in(r), held constant outside the tabulated range.
PairPotential tabulated_radial(std::vector<double> rs, std::vector<double> vs);

}  // namespace qhd
