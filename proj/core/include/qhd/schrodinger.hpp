#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qhd/diagnostics.hpp"
#include "qhd/madelung.hpp"
#include "qhd/nonlinear.hpp"
#include "qhd/potential.hpp"
#include "qhd/spectral.hpp"

namespace qhd {

enum class Scheme { strang };

struct EvolveConfig {
  double dt = 0.0;
  std::size_t steps = 1;
  std::size_t record_every = 1;
  bool imaginary_time = false;
  NonlinearTerm nonlinear;
  Scheme scheme = Scheme::strang;
  /// Madelung engine only: 2/3-rule truncation of the quadratic terms.
  bool dealias = false;
  /// Madelung engine only: exponential filter on the top 10% of modes.
  bool spectral_filter = false;
  /// Keep a copy of the state at every recorded step.
  bool keep_snapshots = false;
  /// Compute full diagnostics at recorded steps (otherwise only norm/energy).
  bool diagnostics = true;

  void validate() const;
};

/// 0.1 m h^2 / (pi hbar), h the smallest grid spacing.
double default_time_step(const LatticeGrid& grid, double hbar, double mass);

enum class RunStatus { completed, non_finite, node_formation };
const char* to_string(RunStatus status);

struct WaveEvolution {
  WaveField state;
  std::vector<DiagnosticsRecord> records;
  std::vector<WaveField> snapshots;
  RunStatus status = RunStatus::completed;
  std::string detail;
};

/// Split-step integrator for the n-particle (nonlinear) Schrodinger equation.
/// Owns its state; not safe to step from several threads at once.
class SchrodingerEngine {
 public:
  SchrodingerEngine(const WaveField& init, std::vector<double> potential, EvolveConfig cfg);
  SchrodingerEngine(const WaveField& init, const PotentialSpec& potential, EvolveConfig cfg);

  /// One Strang step. Throws NonFinite if the state leaves the finite range.
  void step();

  WaveField state() const;
  std::span<const Complex> values() const noexcept { return psi_; }
  double time() const noexcept { return time_; }
  std::size_t step_index() const noexcept { return step_; }
  const LatticeGrid& grid() const noexcept { return grid_; }
  std::span<const double> potential() const noexcept { return potential_; }

  /// Energy of the current state from the wave-function functional.
  double energy() const;
  DiagnosticsRecord diagnostics() const;

  /// Runs cfg.steps steps from the current state.
  WaveEvolution run();

 private:
  void potential_half_step();
  /// Imaginary-time adjoint of the explicit half step: the nonlinear term is
  /// evaluated at the normalized end-of-substep density.
  void implicit_potential_half_step();
  void normalize();

  LatticeGrid grid_;
  SpectralOps ops_;
  double hbar_;
  double mass_;
  EvolveConfig cfg_;
  std::vector<double> potential_;
  std::vector<Complex> psi_;
  std::vector<Complex> kinetic_factor_;
  std::vector<double> kinetic_decay_;
  double time_ = 0.0;
  std::size_t step_ = 0;
};

WaveEvolution evolve(const WaveField& psi, const PotentialSpec& potential, const EvolveConfig& cfg);
WaveEvolution evolve(const WaveField& psi, std::span<const double> potential,
                     const EvolveConfig& cfg);

struct GroundState {
  WaveField state;
  double energy;
  std::size_t steps;
  std::vector<double> energy_history;
};

/// Imaginary-time relaxation with renormalisation after every step. Stops when
/// |E_k - E_{k-1}| < tol |E_k| (or |E_k| and the change both below tol when
/// E_k = 0); throws NoConvergence after `max_steps` (cfg.steps when 0).
GroundState ground_state(const PotentialSpec& potential, const EvolveConfig& cfg,
                         const WaveField& init, double tol = 1e-10, std::size_t max_steps = 0);
GroundState ground_state(std::span<const double> potential, const EvolveConfig& cfg,
                         const WaveField& init, double tol = 1e-10, std::size_t max_steps = 0);

/// Diagnostics for a wave state. Madelung-route quantities become NaN when the
/// state has nodes; the wave-function energy is always filled.
DiagnosticsRecord wave_diagnostics(const WaveField& psi, std::span<const double> potential,
                                   const NonlinearTerm& nonlinear);

}  // namespace qhd
