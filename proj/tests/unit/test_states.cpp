#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qhd/error.hpp"
#include "qhd/monad_scale.hpp"
#include "qhd/potential.hpp"
#include "qhd/states.hpp"

using namespace qhd;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(States, PlaneWaveRequiresGridMode) {
  const auto g = LatticeGrid::cubic(1, 1, 32, 5.0);
  EXPECT_TRUE(is_grid_mode(g, 0, 2.0 * kPi * 3.0 / 5.0));
  EXPECT_FALSE(is_grid_mode(g, 0, 1.0));
  EXPECT_THROW(plane_wave(g, {1.0}, 1.0, 1.0), CommensurabilityError);
  const auto psi = plane_wave(g, {-2.0 * kPi / 5.0}, 1.0, 1.0);
  for (const auto& z : psi.values()) EXPECT_NEAR(std::abs(z), 1.0 / std::sqrt(5.0), 1e-15);
}

TEST(States, GaussianUsesNearestImage) {
  const auto g = LatticeGrid::cubic(1, 1, 64, 10.0);
  // A packet centred near the right edge spills onto the left edge.
  const auto rho = gaussian(g, {{0.5}, {4.8}, {}}, 1.0, 1.0).density();
  EXPECT_GT(rho[0], rho[32]);
  EXPECT_GT(rho[0], 1e-3);
}

TEST(States, PeriodicGaussianIsSmoothAcrossTheSeam) {
  const double s = 1.0;
  const auto g = LatticeGrid::cubic(1, 1, 64, 6.0 * s);
  const auto psi = periodic_gaussian(g, {{s}, {}, {}}, 1.0, 1.0);
  // Image sum is symmetric about x = 0 and about the seam.
  const auto v = psi.values();
  for (std::size_t p = 1; p < 32; ++p) EXPECT_NEAR(v[p].real(), v[64 - p].real(), 1e-14);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
}

TEST(States, HarmonicGroundStateIsTheAnalyticGaussian) {
  const double hbar = 0.8, mass = 1.3, omega = 0.9;
  const auto g = LatticeGrid::cubic(1, 1, 128, 20.0);
  const auto psi = harmonic_ground_state(g, hbar, mass, omega);
  const double alpha = mass * omega / hbar;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double x = g.coordinate(0, p);
    EXPECT_NEAR(psi.values()[p].real(), std::pow(alpha / kPi, 0.25) * std::exp(-0.5 * alpha * x * x), 1e-10);
  }
}

TEST(States, RandomNodelessDensityIsNormalisedPositiveAndSeeded) {
  const auto g = LatticeGrid::cubic(2, 1, 16, 2.0 * kPi);
  const auto a = random_nodeless_density(g, 2, 0.3, 5);
  const auto b = random_nodeless_density(g, 2, 0.3, 5);
  const auto c = random_nodeless_density(g, 2, 0.3, 6);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NEAR(integrate(g, a), 1.0, 1e-14);
  for (double r : a) EXPECT_GT(r, 0.0);
}

TEST(PotentialSpec, ExternalAndPairwiseParts) {
  const auto g = LatticeGrid::cubic(2, 1, 16, 4.0);
  auto pot = PotentialSpec::harmonic(2.0, 1.5);
  pot.with_pairwise([](double r) { return 1.0 / (1.0 + r * r); }, "soft");
  const auto total = pot.sample(g);
  const auto v1 = pot.sample_particle(g, 0);
  const auto v2 = pot.sample_particle(g, 1);
  std::vector<double> x(2);
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.coordinates(p, x);
    double r = std::abs(x[0] - x[1]);
    r = std::min(r, 4.0 - r);
    const double expected = 0.5 * 2.0 * 1.5 * 1.5 * (x[0] * x[0] + x[1] * x[1]) + 1.0 / (1.0 + r * r);
    EXPECT_NEAR(total[p], expected, 1e-12);
    EXPECT_NEAR(v1[p] + v2[p], total[p], 1e-12);
  }
}

TEST(PotentialSpec, TabulatedInterpolants) {
  const auto ext = tabulated_external({-1.0, 0.0, 1.0}, {2.0, 0.0, 1.0}, 4.0);
  const double x0[] = {0.5};
  EXPECT_NEAR(ext(x0), 0.5, 1e-15);
  const auto radial = tabulated_radial({0.0, 1.0}, {3.0, 1.0});
  EXPECT_NEAR(radial(0.25), 2.5, 1e-15);
  EXPECT_NEAR(radial(5.0), 1.0, 1e-15);
}

TEST(MonadScale, ConstantMapping) {
  const MonadScale scale(1000.0, 2e-3, 5e-4);
  EXPECT_DOUBLE_EQ(scale.mass(), 2.0);
  EXPECT_DOUBLE_EQ(scale.hbar(), 0.5);
  EXPECT_DOUBLE_EQ(scale.system_mass(3), 6.0);
  EXPECT_DOUBLE_EQ(scale.total_monads(3), 3000.0);
  // c at the monad scale is c at the quantum scale divided by N.
  EXPECT_NEAR(scale.monad_c(), -scale.hbar() * scale.hbar() / (4.0 * scale.mass()) / 1000.0, 1e-18);
  EXPECT_THROW(MonadScale(0.0, 1.0, 1.0), ValidationError);
}
