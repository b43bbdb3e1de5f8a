#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qhd/potential.hpp"

namespace qhd {

/// Counter-based generator: the stream for (seed, step, cell) is a pure
/// function of those three numbers, so sweeps can be split across threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t step, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Classical monads on a periodic box centered on the origin.
struct MonadEnsemble {
  std::size_t dims = 1;
  double mu = 1.0;
  std::vector<double> box;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::vector<double> positions;   ///< count x dims, monad-major
  std::vector<double> velocities;  ///< count x dims

  std::size_t count() const noexcept { return dims == 0 ? 0 : positions.size() / dims; }
  std::span<const double> position(std::size_t i) const { return {positions.data() + i * dims, dims}; }
  std::span<const double> velocity(std::size_t i) const { return {velocities.data() + i * dims, dims}; }

  /// Throws ValidationError unless dims is 1..3, count >= 2, mu > 0, the box
  /// is positive, positions lie inside it and velocities are finite.
  void validate() const;

  std::vector<double> total_momentum() const;
  double kinetic_energy() const;
};

/// Sampling recipe for an initial ensemble.
struct EnsembleSpec {
  std::size_t count = 0;
  std::size_t dims = 1;
  double mu = 1.0;
  std::vector<double> box;
  /// Velocity variance per component is temperature / mu.
  double temperature = 1.0;
  std::vector<double> drift;
  /// Optional per-axis temperatures; overrides `temperature` when set.
  std::vector<double> axis_temperatures;
  /// Density 1 + amplitude * sin(2 pi x_axis / L) along `wave_axis`.
  double density_amplitude = 0.0;
  std::size_t wave_axis = 0;
  std::uint64_t seed = 0;
};

MonadEnsemble sample_ensemble(const EnsembleSpec& spec);

/// Single-monad potential energy and the matching force F = -grad V.
class MonadPotential {
 public:
  using Value = std::function<double(std::span<const double>)>;
  using Force = std::function<void(std::span<const double>, std::span<double>)>;

  MonadPotential() = default;
  MonadPotential(Value value, Force force) : value_(std::move(value)), force_(std::move(force)) {}

  static MonadPotential zero() { return {}; }
  /// Constant force, V = -F.x.
  static MonadPotential uniform(std::vector<double> force);
  /// V = k |x - center|^2 / 2 with the displacement taken at face value.
  static MonadPotential harmonic(double stiffness, std::vector<double> center = {});
  /// External part of a PotentialSpec, force by central differences.
  static MonadPotential from_external(const PotentialSpec& spec, double step = 1e-6);

  bool is_zero() const noexcept { return !value_ && !force_; }
  double value(std::span<const double> x) const { return value_ ? value_(x) : 0.0; }
  void force(std::span<const double> x, std::span<double> out) const;

 private:
  Value value_;
  Force force_;
};

/// Velocity-Verlet step under the external force with periodic wrap.
MonadEnsemble stream_and_force(const MonadEnsemble& ens, const MonadPotential& potential, double dt);

struct CollisionSettings {
  /// Cells per axis; the box is divided evenly.
  std::vector<std::size_t> cells;
  /// Candidate collisions per monad per unit time.
  double rate = 0.0;
};

/// Cells per axis for a requested cell edge length (at least one).
std::vector<std::size_t> cells_for_size(const std::vector<double>& box, double cell_size);

struct CollisionStats {
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  long long delta_count = 0;
  std::vector<double> delta_momentum;
  double delta_energy = 0.0;
  /// Worst per-event |dp| / (|p_i| + |p_j|) and |dE| / (E_i + E_j).
  double max_event_momentum_error = 0.0;
  double max_event_energy_error = 0.0;
};

struct CollisionOutcome {
  MonadEnsemble ensemble;
  CollisionStats stats;
};

/// Stochastic binary collisions inside each cell. Accepted pairs keep their
/// center-of-mass velocity and relative speed; the relative direction is
/// redrawn isotropically (exchanged in 1D). Random streams are keyed by
/// (seed, step, cell).
CollisionOutcome collide(const MonadEnsemble& ens, const CollisionSettings& settings, double dt);

/// Stream, collide and advance the step counter.
CollisionOutcome advance(const MonadEnsemble& ens, const MonadPotential& potential,
                         const CollisionSettings& settings, double dt);

/// Cell averages of the velocity moments.
struct MomentFields {
  std::size_t dims = 1;
  double mu = 1.0;
  std::vector<std::size_t> cells;
  std::vector<double> box;
  std::vector<std::size_t> count;
  std::vector<std::uint8_t> masked;
  std::vector<double> density;       ///< monads per unit volume
  std::vector<double> velocity;      ///< mean v, cells x dims
  std::vector<double> stress;        ///< mu <(v-u)_i (v-u)_j>, cells x dims x dims
  std::vector<double> heat_flux;     ///< mu/2 <|v-u|^2 (v-u)_i>, cells x dims
  std::vector<double> internal_energy;
  std::vector<double> energy;        ///< mu u^2/2 + eps + V(cell center)
  std::vector<double> energy_flux;   ///< E u_i + sigma_ij u_j + h_i, cells x dims
  std::vector<double> force;         ///< mean external force on the cell's monads, cells x dims

  std::size_t cell_count() const;
  double cell_volume() const;
  std::vector<double> cell_center(std::size_t cell) const;
};

/// Projection over all monads whose index satisfies `select` (all when
/// empty); each counted monad has weight `weight`. Cells with fewer than
/// `min_count` selected monads are masked.
MomentFields project_moments(const MonadEnsemble& ens, const std::vector<std::size_t>& cells,
                             const MonadPotential& potential = {}, std::size_t min_count = 20,
                             const std::function<bool(std::size_t)>& select = {},
                             double weight = 1.0);

/// Full projection plus the even- and odd-index half ensembles, whose
/// densities are doubled so that all three estimate the same fields.
struct SplitMoments {
  MomentFields full;
  MomentFields half_a;
  MomentFields half_b;
};

SplitMoments project_split(const MonadEnsemble& ens, const std::vector<std::size_t>& cells,
                           const MonadPotential& potential = {}, std::size_t min_count = 20);

struct ResidualNorm {
  double l2 = 0.0;           ///< RMS over cells and intervals
  double noise_floor = 0.0;  ///< ||R_a - R_b|| / 2
  double scale = 0.0;        ///< RMS of the largest term
  double ratio() const { return noise_floor > 0.0 ? l2 / noise_floor : (l2 > 0.0 ? 1e300 : 0.0); }
  double normalized() const { return scale > 0.0 ? l2 / scale : l2; }
};

struct MomentResiduals {
  ResidualNorm continuity;
  std::vector<ResidualNorm> momentum;  ///< per axis
  ResidualNorm energy;
  std::size_t intervals = 0;
};

/// Residuals of the conservative moment equations
///   d rho/dt + d_j(rho u_j) = 0
///   mu d(rho u_i)/dt + d_j(mu rho u_i u_j + rho sigma_ij) - rho F_i = 0
///   d(rho E)/dt + d_j(rho s_j) = 0
/// with centered time differences and spectral derivatives over the cell grid.
MomentResiduals moment_residuals(const std::vector<SplitMoments>& series, double dt);

/// Binary checkpoint "MON1": text header, then little-endian positions and
/// velocities.
void write_ensemble(std::ostream& out, const MonadEnsemble& ens);
MonadEnsemble read_ensemble(std::istream& in);
void save_ensemble(const std::filesystem::path& path, const MonadEnsemble& ens);
MonadEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace qhd
