#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qhd/diagnostics.hpp"
#include "qhd/grid.hpp"
#include "qhd/madelung.hpp"
#include "qhd/nonlinear.hpp"
#include "qhd/potential.hpp"

namespace qhd {

/// Field with points below the density floor masked (value 0 there).
struct MaskedField {
  std::vector<double> values;
  std::vector<std::uint8_t> masked;

  std::size_t masked_count() const;
};

/// W = -(hbar^2/2m) rho^{-1/2} Laplacian(rho^{1/2}).
MaskedField quantum_potential(const LatticeGrid& grid, std::span<const double> rho, double hbar,
                              double mass);

/// W_i: the same with the Laplacian restricted to particle i's coordinates.
MaskedField quantum_potential_block(const LatticeGrid& grid, std::span<const double> rho,
                                    double hbar, double mass, std::size_t particle);

/// Symmetric sigma_jk = c d_j d_k ln(rho) + delta_jk (1/rho) int rho U'(rho) d rho.
class StressTensor {
 public:
  StressTensor(std::size_t rank, std::size_t points);

  std::size_t rank() const noexcept { return rank_; }
  std::span<const double> component(std::size_t j, std::size_t k) const;
  std::span<double> component(std::size_t j, std::size_t k);
  double operator()(std::size_t j, std::size_t k, std::size_t point) const {
    return component(j, k)[point];
  }
  std::vector<std::uint8_t> masked;

 private:
  std::size_t slot(std::size_t j, std::size_t k) const;

  std::size_t rank_;
  std::vector<std::vector<double>> packed_;
};

StressTensor stress_tensor(const LatticeGrid& grid, std::span<const double> rho,
                           const ConstitutiveParams& params);

/// Norms of R_j = dW/dx_j - d sigma_jk/dx_k - sigma_jk d ln(rho)/dx_k.
///
/// Evaluated in the density-weighted form rho R_j, which is smooth on the
/// torus even where ln(rho) is not. `l2[j]` = sqrt(int rho R_j^2),
/// `max[j]` = max |rho R_j| / max(rho); masked points are excluded.
struct ConstitutiveResidual {
  std::vector<double> l2;
  std::vector<double> max;

  double worst_l2() const;
  double worst_max() const;
};

ConstitutiveResidual constitutive_residual(const LatticeGrid& grid, std::span<const double> rho,
                                           const ConstitutiveParams& params);

/// u = (1/m) dS/dx, one vector per axis.
std::vector<std::vector<double>> velocity_field(const MadelungPair& pair, double mass);

struct FisherInformation {
  double total = 0.0;
  std::vector<double> blocks;  ///< I_i, one per particle
};

/// I = int (1/rho)|d rho/dx|^2 and its per-particle restrictions.
FisherInformation fisher_information(const LatticeGrid& grid, std::span<const double> rho);

/// Energy functional of the wave-function form:
/// int (hbar^2/2m)|dPsi/dx|^2 + V |Psi|^2 + F(|Psi|^2), with F' = U.
double wave_energy(const WaveField& psi, std::span<const double> potential,
                   const NonlinearTerm& nonlinear);

/// L2 norm of d rho/dt + div(rho u), with d rho/dt from the Schrodinger
/// right-hand side of `psi` and u from the phase of `pair`.
double continuity_residual(const WaveField& psi, const MadelungPair& pair);

/// Both energy routes plus Fisher information and residuals for a state.
DiagnosticsRecord energy_report(const MadelungPair& pair, double mass,
                                std::span<const double> potential,
                                const ConstitutiveParams& params);
DiagnosticsRecord energy_report(const MadelungPair& pair, double mass,
                                const PotentialSpec& potential, const ConstitutiveParams& params);
DiagnosticsRecord energy_report(const WaveField& psi, std::span<const double> potential,
                                const ConstitutiveParams& params);
DiagnosticsRecord energy_report(const WaveField& psi, const PotentialSpec& potential,
                                const ConstitutiveParams& params);

}  // namespace qhd
