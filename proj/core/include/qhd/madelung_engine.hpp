#pragma once

#include <span>
#include <string>
#include <vector>

#include "qhd/diagnostics.hpp"
#include "qhd/madelung.hpp"
#include "qhd/nonlinear.hpp"
#include "qhd/potential.hpp"
#include "qhd/schrodinger.hpp"

namespace qhd {

struct PairEvolution {
  MadelungPair state;
  std::vector<DiagnosticsRecord> records;
  std::vector<MadelungPair> snapshots;
  RunStatus status = RunStatus::completed;
  std::string detail;
};

/// Fourth-order Runge-Kutta evolution of (rho, S):
///   d rho/dt = -div(rho grad S / m)
///   d S/dt   = -|grad S|^2/2m - W(rho) - U(rho) - V
/// with W built from params.c, so ConstitutiveParams::classical gives the
/// pressureless classical fluid. Mass drift is recorded, never corrected.
class MadelungEngine {
 public:
  MadelungEngine(const MadelungPair& init, double mass, std::vector<double> potential,
                 ConstitutiveParams params, EvolveConfig cfg);
  MadelungEngine(const MadelungPair& init, double mass, const PotentialSpec& potential,
                 ConstitutiveParams params, EvolveConfig cfg);

  /// One RK4 step. Throws NodeFormation when min rho drops below the floor
  /// and NonFinite on blow-up; the state is left at the last good step.
  void step();

  /// Current state, rescaled to unit mass for validation.
  MadelungPair state() const;
  std::span<const double> rho() const noexcept { return rho_; }
  std::span<const double> phase() const noexcept { return phase_; }
  double mass_integral() const;
  double time() const noexcept { return time_; }
  std::size_t step_index() const noexcept { return step_; }

  DiagnosticsRecord diagnostics() const;
  PairEvolution run();

 private:
  struct Rates {
    std::vector<double> rho;
    std::vector<double> phase;
  };
  Rates rates(std::span<const double> rho, std::span<const double> phase) const;
  void smooth(std::vector<double>& f) const;

  LatticeGrid grid_;
  SpectralOps ops_;
  double hbar_;
  double mass_;
  ConstitutiveParams params_;
  EvolveConfig cfg_;
  std::vector<double> potential_;
  std::vector<double> rho_;
  std::vector<double> phase_;
  std::vector<double> filter_;  // empty when neither dealiasing nor filtering
  double time_ = 0.0;
  std::size_t step_ = 0;
};

PairEvolution evolve_madelung(const MadelungPair& pair, double mass, const PotentialSpec& potential,
                              const ConstitutiveParams& params, const EvolveConfig& cfg);
PairEvolution evolve_madelung(const MadelungPair& pair, double mass,
                              std::span<const double> potential, const ConstitutiveParams& params,
                              const EvolveConfig& cfg);

struct HydroResiduals {
  std::vector<double> continuity;       ///< one L2 norm per interior snapshot
  std::vector<double> hamilton_jacobi;  ///< same, for the scalar momentum equation
  double max_continuity() const;
  double max_hamilton_jacobi() const;
};

/// Residuals of d rho/dt + div(rho u) = 0 and
/// dS/dt + m|u|^2/2 + W + U + V = 0 on a uniformly spaced series, with
/// centered time differences (phase differences taken modulo 2 pi hbar).
/// Points below the density floor are left out of the norms.
HydroResiduals hydrodynamic_residuals(const std::vector<MadelungPair>& series, double dt,
                                      double mass, std::span<const double> potential,
                                      const ConstitutiveParams& params);

}  // namespace qhd
