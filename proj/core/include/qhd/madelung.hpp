#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qhd/grid.hpp"
#include "qhd/spectral.hpp"

namespace qhd {

/// Relative density floor: points with rho < kRhoFloorFraction * max(rho)
/// have no meaningful phase and are excluded from divisions and norms.
inline constexpr double kRhoFloorFraction = 1e-12;
inline constexpr double kNormTolerance = 1e-9;

double rho_floor(std::span<const double> rho);

/// Complex n-particle field with unit discrete L2 norm.
class WaveField {
 public:
  /// Validates finiteness and |norm - 1| <= 1e-9.
  WaveField(LatticeGrid grid, std::vector<Complex> values, double hbar, double mass);

  /// Rescales `values` to unit norm before validating.
  static WaveField normalized(LatticeGrid grid, std::vector<Complex> values, double hbar,
                              double mass);

  const LatticeGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }
  double norm() const;
  std::vector<double> density() const;

 private:
  LatticeGrid grid_;
  std::vector<Complex> values_;
  double hbar_;
  double mass_;
};

/// Density/phase representation: rho >= 0 normalised, phase in action units.
///
/// `flagged` marks points whose phase was filled by continuation because the
/// density there is below the floor. The pair carries hbar because the phase
/// is only defined modulo 2*pi*hbar.
class MadelungPair {
 public:
  MadelungPair(LatticeGrid grid, std::vector<double> rho, std::vector<double> phase, double hbar,
               std::vector<std::uint8_t> flagged = {});

  const LatticeGrid& grid() const noexcept { return grid_; }
  std::span<const double> rho() const noexcept { return rho_; }
  std::span<const double> phase() const noexcept { return phase_; }
  std::span<const std::uint8_t> flagged() const noexcept { return flagged_; }
  double hbar() const noexcept { return hbar_; }
  std::size_t flagged_count() const;
  double mass_integral() const;

 private:
  LatticeGrid grid_;
  std::vector<double> rho_;
  std::vector<double> phase_;
  std::vector<std::uint8_t> flagged_;
  double hbar_;
};

enum class PhaseUnwrapPolicy { axis_sweep, none };

/// Psi -> (rho, S) with S = hbar * arg(Psi), unwrapped by a sequential sweep
/// over axes 0..D-1. Throws UnwrapAmbiguous at a node crossing.
MadelungPair to_madelung(const WaveField& psi,
                         PhaseUnwrapPolicy policy = PhaseUnwrapPolicy::axis_sweep);

/// (rho, S) -> Psi = sqrt(rho) exp(iS/hbar), renormalised.
WaveField to_wavefield(const MadelungPair& pair, double mass);

/// d S / d x_axis for a phase field that may wind by multiples of
/// 2*pi*hbar around the torus. Each grid line has its winding removed as a
/// linear ramp before the spectral derivative and restored afterwards.
std::vector<double> phase_gradient(const SpectralOps& ops, std::span<const double> phase,
                                   std::size_t axis, double hbar);

/// Wraps an angle-like value into (-period/2, period/2].
double wrap_symmetric(double value, double period);

}  // namespace qhd
