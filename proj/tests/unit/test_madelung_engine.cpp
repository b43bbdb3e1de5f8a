#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "qhd/error.hpp"
#include "qhd/madelung_engine.hpp"
#include "qhd/observables.hpp"
#include "qhd/states.hpp"

using namespace qhd;

namespace {

constexpr double kPi = std::numbers::pi;

EvolveConfig steps_of(double dt, std::size_t steps, std::size_t record_every) {
  EvolveConfig cfg;
  cfg.dt = dt;
  cfg.steps = steps;
  cfg.record_every = record_every;
  return cfg;
}

std::vector<double> zeros(const LatticeGrid& g) { return std::vector<double>(g.size(), 0.0); }

}  // namespace

TEST(MadelungEngine, UniformStateIsExactlyStationary) {
  const auto g = LatticeGrid::cubic(2, 1, 16, 3.0);
  const MadelungPair pair(g, std::vector<double>(g.size(), 1.0 / 9.0), zeros(g), 1.0);
  MadelungEngine engine(pair, 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0), steps_of(0.01, 50, 50));
  EXPECT_EQ(engine.run().status, RunStatus::completed);
  for (std::size_t p = 0; p < g.size(); ++p) {
    EXPECT_EQ(engine.rho()[p], pair.rho()[p]);
    EXPECT_EQ(engine.phase()[p], 0.0);
  }
}

namespace {

// Lowest eigenpair of the spectral Hamiltonian on a 1D torus, by dense diagonalization.
std::pair<double, std::vector<double>> dense_ground_state(const LatticeGrid& g, std::span<const double> v) {
  const std::size_t n = g.size();
  const double length = g.length(0);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double t = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const double k = 2.0 * kPi * (double(m) - (m > n / 2 ? double(n) : 0.0)) / length;
        t += k * k * std::cos(k * (double(i) - double(j)) * g.spacing(0));
      }
      h(Eigen::Index(i), Eigen::Index(j)) = 0.5 * t / double(n);
    }
    h(Eigen::Index(i), Eigen::Index(i)) += v[i];
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  std::vector<double> rho(n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = std::pow(solver.eigenvectors()(Eigen::Index(i), 0), 2);
    norm += rho[i] * g.spacing(0);
  }
  for (auto& r : rho) r /= norm;
  return {solver.eigenvalues()(0), rho};
}

}  // namespace

TEST(MadelungEngine, HarmonicGroundStatePhaseRotatesUniformly) {
  // Tails near 1e-7 of the peak; the flux terms in rho'/rho stiffen RK4, so
  // the step is a quarter of the kinetic estimate.
  const double omega = 1.0;
  const auto g = LatticeGrid::cubic(1, 1, 64, 8.0);
  const auto v = PotentialSpec::harmonic(1.0, omega).sample(g);
  const auto [energy, rho] = dense_ground_state(g, v);
  EXPECT_NEAR(energy, 0.5 * omega, 1e-6);
  const MadelungPair pair(g, rho, zeros(g), 1.0);
  MadelungEngine engine(pair, 1.0, v, ConstitutiveParams::quantum(1.0, 1.0),
                        steps_of(0.25 * default_time_step(g, 1.0, 1.0), 2000, 2000));
  const auto out = engine.run();
  ASSERT_EQ(out.status, RunStatus::completed) << out.detail;
  const double t = engine.time();
  for (std::size_t p = 0; p < g.size(); ++p) {
    EXPECT_NEAR(engine.rho()[p], rho[p], 1e-6);
    EXPECT_NEAR(engine.phase()[p], -0.5 * omega * t, 1e-6);
  }
}

TEST(MadelungEngine, MassAndEnergyDrift) {
  const double length = 12.0;
  const auto g = LatticeGrid::cubic(1, 1, 128, length);
  const auto psi = periodic_gaussian(g, {{1.5}, {0.5}, {2.0 * kPi / length}}, 1.0, 1.0);
  std::vector<double> v(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) v[p] = 0.3 * std::cos(2.0 * kPi * g.coordinate(0, p) / length);
  const auto params = ConstitutiveParams::quantum(1.0, 1.0, NonlinearTerm::cubic(0.3));
  MadelungEngine engine(to_madelung(psi), 1.0, v, params, steps_of(default_time_step(g, 1.0, 1.0), 1000, 1000));
  const double m0 = engine.mass_integral();
  const double e0 = engine.diagnostics().h_total;
  const auto out = engine.run();
  ASSERT_EQ(out.status, RunStatus::completed) << out.detail;
  EXPECT_LT(std::abs(engine.mass_integral() - m0), 1e-6);
  EXPECT_LT(std::abs(engine.diagnostics().h_total - e0) / std::abs(e0), 1e-5);
}

TEST(MadelungEngine, AgreesWithWaveEngineOnFreePacket) {
  const auto g = LatticeGrid::cubic(1, 1, 256, 10.0);
  const auto psi = periodic_gaussian(g, {{1.0}, {}, {}}, 1.0, 1.0);
  auto cfg = steps_of(default_time_step(g, 1.0, 1.0), 2000, 500);
  cfg.keep_snapshots = true;
  cfg.diagnostics = false;
  const auto wave = evolve(psi, zeros(g), cfg);
  const auto hydro = evolve_madelung(to_madelung(psi), 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0), cfg);
  ASSERT_EQ(wave.snapshots.size(), hydro.snapshots.size());
  for (std::size_t k = 0; k < wave.snapshots.size(); ++k) {
    const auto a = wave.snapshots[k].density();
    double s = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) s += std::pow(a[p] - hydro.snapshots[k].rho()[p], 2);
    EXPECT_LT(std::sqrt(s * g.cell_volume()), 1e-3);
  }
}

TEST(MadelungEngine, VelocityStaysCurlFree) {
  const auto g = LatticeGrid::cubic(2, 1, 32, 2.0 * kPi);
  const auto rho = random_nodeless_density(g, 1, 0.2, 3);
  std::vector<double> phase(g.size());
  std::vector<double> x(2);
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.coordinates(p, x);
    phase[p] = 0.2 * std::sin(x[0]) * std::cos(x[1]) + x[1];
  }
  auto cfg = steps_of(1e-3, 100, 100);
  cfg.diagnostics = false;
  const auto out = evolve_madelung(MadelungPair(g, rho, phase, 1.0), 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0), cfg);
  ASSERT_EQ(out.status, RunStatus::completed);
  const auto u = velocity_field(out.state, 1.0);
  const SpectralOps ops(g);
  const auto duy_dx = ops.derivative(std::span<const double>(u[1]), 0);
  const auto dux_dy = ops.derivative(std::span<const double>(u[0]), 1);
  for (std::size_t p = 0; p < g.size(); ++p) EXPECT_NEAR(duy_dx[p] - dux_dy[p], 0.0, 1e-10);
}

TEST(MadelungEngine, AbortsAtNodeWithPartialResults) {
  // psi = 1 + i e^{-i t/2} cos x is nodeless until t = pi, when it vanishes at x = pi.
  const auto g = LatticeGrid::cubic(1, 1, 64, 2.0 * kPi);
  std::vector<Complex> v(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) v[p] = 1.0 + Complex(0.0, 1.0) * std::cos(g.coordinate(0, p));
  const auto psi = WaveField::normalized(g, v, 1.0, 1.0);
  auto cfg = steps_of(1e-3, 5000, 100);
  cfg.diagnostics = false;
  const auto out = evolve_madelung(to_madelung(psi), 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0), cfg);
  EXPECT_EQ(out.status, RunStatus::node_formation);
  EXPECT_FALSE(out.detail.empty());
  ASSERT_FALSE(out.records.empty());
  EXPECT_LT(out.records.back().time, kPi + 0.05);
  EXPECT_GT(out.records.back().time, 2.0);

  MadelungEngine engine(to_madelung(psi), 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0), cfg);
  EXPECT_THROW(for (int i = 0; i < 5000; ++i) engine.step(), NodeFormation);
}

TEST(MadelungEngine, FilterAndDealiasKeepSmoothStatesClose) {
  const auto g = LatticeGrid::cubic(1, 1, 128, 10.0);
  const auto pair = to_madelung(periodic_gaussian(g, {{1.0}, {}, {2.0 * kPi / 10.0}}, 1.0, 1.0));
  auto cfg = steps_of(default_time_step(g, 1.0, 1.0), 500, 500);
  cfg.diagnostics = false;
  const auto plain = evolve_madelung(pair, 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0), cfg);
  cfg.dealias = true;
  cfg.spectral_filter = true;
  const auto smoothed = evolve_madelung(pair, 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0), cfg);
  ASSERT_EQ(smoothed.status, RunStatus::completed);
  double worst = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p)
    worst = std::max(worst, std::abs(plain.state.rho()[p] - smoothed.state.rho()[p]));
  EXPECT_LT(worst, 1e-6);
}

TEST(HydroResiduals, RequiresThreeSnapshots) {
  const auto g = LatticeGrid::cubic(1, 1, 16, 1.0);
  const MadelungPair pair(g, std::vector<double>(16, 1.0), zeros(g), 1.0);
  EXPECT_THROW(hydrodynamic_residuals({pair, pair}, 0.1, 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0)),
               SeriesTooShort);
  const auto r = hydrodynamic_residuals({pair, pair, pair}, 0.1, 1.0, zeros(g), ConstitutiveParams::quantum(1.0, 1.0));
  EXPECT_EQ(r.max_continuity(), 0.0);
  EXPECT_EQ(r.max_hamilton_jacobi(), 0.0);
}

namespace {

// Residuals of a free-packet series over t in [0, 0.2], sampled every `spacing`.
HydroResiduals packet_residuals(double spacing, bool from_wave) {
  const auto g = LatticeGrid::cubic(1, 1, 128, 10.0);
  const auto psi = periodic_gaussian(g, {{1.0}, {}, {2.0 * kPi / 10.0}}, 1.0, 1.0);
  const double dt = 1e-4;
  const std::size_t stride = std::size_t(std::llround(spacing / dt));
  auto cfg = steps_of(dt, 2000, stride);
  cfg.keep_snapshots = true;
  cfg.diagnostics = false;
  std::vector<MadelungPair> series;
  const auto params = ConstitutiveParams::quantum(1.0, 1.0);
  if (from_wave) {
    for (const auto& s : evolve(psi, zeros(g), cfg).snapshots) series.push_back(to_madelung(s));
  } else {
    series = evolve_madelung(to_madelung(psi), 1.0, zeros(g), params, cfg).snapshots;
  }
  return hydrodynamic_residuals(series, spacing, 1.0, zeros(g), params);
}

}  // namespace

TEST(HydroResiduals, CenteredDifferencesConvergeAtSecondOrder) {
  for (bool from_wave : {false, true}) {
    const auto coarse = packet_residuals(0.02, from_wave);
    const auto fine = packet_residuals(0.01, from_wave);
    EXPECT_NEAR(coarse.max_continuity() / fine.max_continuity(), 4.0, 0.4) << from_wave;
    EXPECT_NEAR(coarse.max_hamilton_jacobi() / fine.max_hamilton_jacobi(), 4.0, 0.4) << from_wave;
  }
}
