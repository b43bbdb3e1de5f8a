#pragma once

#include <cstdint>
#include <vector>

#include "qhd/grid.hpp"
#include "qhd/madelung.hpp"

namespace qhd {

/// exp(i k.x)/sqrt(V). Each k[a] must be a multiple of 2*pi/L_a.
WaveField plane_wave(const LatticeGrid& grid, const std::vector<double>& k, double hbar,
                     double mass);

/// Per-axis Gaussian packet parameters; empty vectors mean zero.
struct GaussianPacket {
  std::vector<double> widths;   ///< standard deviation of |Psi|^2 along each axis
  std::vector<double> centers;
  std::vector<double> wavenumbers;
};

/// Product of 1D packets exp(-(x-c)^2/4s^2 + i k x), discretely normalised.
/// Displacements use the nearest periodic image of the center.
WaveField gaussian(const LatticeGrid& grid, const GaussianPacket& packet, double hbar,
                   double mass);

/// Like `gaussian`, but the amplitude is summed over periodic images so that
/// sqrt(rho) stays smooth across the torus seam.
WaveField periodic_gaussian(const LatticeGrid& grid, const GaussianPacket& packet, double hbar,
                            double mass);

/// Ground state of V = m omega^2 |x - center|^2 / 2 on every axis.
WaveField harmonic_ground_state(const LatticeGrid& grid, double hbar, double mass, double omega,
                                const std::vector<double>& center = {});

/// Normalised exp(g) with g a random real Fourier series of modes
/// |m_a| <= max_mode and coefficients of size ~amplitude; nodeless and
/// band-limited in log form. Deterministic in `seed`.
std::vector<double> random_nodeless_density(const LatticeGrid& grid, std::size_t max_mode,
                                            double amplitude, std::uint64_t seed);

/// 2*pi/L-commensurability test used for plane-wave modes.
bool is_grid_mode(const LatticeGrid& grid, std::size_t axis, double k);

}  // namespace qhd
