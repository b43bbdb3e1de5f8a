#include "qhd/states.hpp"

#include <cmath>
#include <numbers>

#include "qhd/error.hpp"
#include "qhd/kinetics.hpp"

namespace qhd {

namespace {

double value_or_zero(const std::vector<double>& v, std::size_t a) { return a < v.size() ? v[a] : 0.0; }

void check_packet(const LatticeGrid& grid, const GaussianPacket& packet) {
  if (packet.widths.size() != grid.rank())
    throw ValidationError("gaussian needs one width per axis");
  for (double s : packet.widths)
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("gaussian widths must be > 0");
  if (!packet.centers.empty() && packet.centers.size() != grid.rank())
    throw ValidationError("gaussian centers must match the grid rank");
  if (!packet.wavenumbers.empty() && packet.wavenumbers.size() != grid.rank())
    throw ValidationError("gaussian wavenumbers must match the grid rank");
}

template <class Amplitude>
WaveField product_state(const LatticeGrid& grid, const GaussianPacket& packet, double hbar,
                        double mass, Amplitude amplitude) {
  check_packet(grid, packet);
  std::vector<Complex> values(grid.size());
  std::vector<double> x(grid.rank());
  for (std::size_t p = 0; p < values.size(); ++p) {
    grid.coordinates(p, x);
    double amp = 1.0;
    double phase = 0.0;
    for (std::size_t a = 0; a < grid.rank(); ++a) {
      amp *= amplitude(a, x[a] - value_or_zero(packet.centers, a));
      phase += value_or_zero(packet.wavenumbers, a) * x[a];
    }
    values[p] = std::polar(amp, phase);
  }
  return WaveField::normalized(grid, std::move(values), hbar, mass);
}

}  // namespace

bool is_grid_mode(const LatticeGrid& grid, std::size_t axis, double k) {
  const double cycles = k * grid.length(axis) / (2.0 * std::numbers::pi);
  return std::abs(cycles - std::round(cycles)) <= 1e-9 * std::max(1.0, std::abs(cycles));
}

WaveField plane_wave(const LatticeGrid& grid, const std::vector<double>& k, double hbar,
                     double mass) {
  if (k.size() != grid.rank()) throw ValidationError("plane wave needs one wavenumber per axis");
  for (std::size_t a = 0; a < k.size(); ++a)
    if (!is_grid_mode(grid, a, k[a]))
      throw CommensurabilityError("wavenumber " + std::to_string(k[a]) + " on axis " +
                                  std::to_string(a) + " is not a grid mode");
  const double amp = 1.0 / std::sqrt(grid.volume());
  std::vector<Complex> values(grid.size());
  std::vector<double> x(grid.rank());
  for (std::size_t p = 0; p < values.size(); ++p) {
    grid.coordinates(p, x);
    double phase = 0.0;
    for (std::size_t a = 0; a < k.size(); ++a) phase += k[a] * x[a];
    values[p] = std::polar(amp, phase);
  }
  return WaveField::normalized(grid, std::move(values), hbar, mass);
}

WaveField gaussian(const LatticeGrid& grid, const GaussianPacket& packet, double hbar,
                   double mass) {
  return product_state(grid, packet, hbar, mass, [&](std::size_t a, double dx) {
    const double L = grid.length(a);
    dx -= L * std::round(dx / L);
    const double s = packet.widths[a];
    return std::exp(-dx * dx / (4.0 * s * s));
  });
}

WaveField periodic_gaussian(const LatticeGrid& grid, const GaussianPacket& packet, double hbar,
                            double mass) {
  return product_state(grid, packet, hbar, mass, [&](std::size_t a, double dx) {
    const double L = grid.length(a);
    const double s = packet.widths[a];
    dx -= L * std::round(dx / L);
    double sum = 0.0;
    for (int image = -3; image <= 3; ++image) {
      const double y = dx - image * L;
      sum += std::exp(-y * y / (4.0 * s * s));
    }
    return sum;
  });
}

WaveField harmonic_ground_state(const LatticeGrid& grid, double hbar, double mass, double omega,
                                const std::vector<double>& center) {
  if (!(omega > 0.0)) throw ValidationError("omega must be > 0");
  GaussianPacket packet;
  packet.widths.assign(grid.rank(), std::sqrt(hbar / (2.0 * mass * omega)));
  packet.centers = center;
  return gaussian(grid, packet, hbar, mass);
}

std::vector<double> random_nodeless_density(const LatticeGrid& grid, std::size_t max_mode,
                                            double amplitude, std::uint64_t seed) {
  const std::size_t rank = grid.rank();
  const long span = 2 * long(max_mode) + 1;
  std::size_t n_modes = 1;
  for (std::size_t a = 0; a < rank; ++a) n_modes *= std::size_t(span);
  struct Mode {
    std::vector<double> k;
    double cos_coef;
    double sin_coef;
  };
  std::vector<Mode> modes;
  CounterRng rng(seed, 0, 0);
  for (std::size_t m = 1; m < n_modes; ++m) {
    Mode mode;
    std::size_t rest = m;
    for (std::size_t a = 0; a < rank; ++a) {
      const long idx = long(rest % std::size_t(span)) - long(max_mode);
      rest /= std::size_t(span);
      mode.k.push_back(2.0 * std::numbers::pi * double(idx) / grid.length(a));
    }
    mode.cos_coef = amplitude * (2.0 * rng.uniform() - 1.0);
    mode.sin_coef = amplitude * (2.0 * rng.uniform() - 1.0);
    modes.push_back(std::move(mode));
  }
  std::vector<double> rho(grid.size());
  std::vector<double> x(rank);
  for (std::size_t p = 0; p < rho.size(); ++p) {
    grid.coordinates(p, x);
    double g = 0.0;
    for (const auto& mode : modes) {
      double phase = 0.0;
      for (std::size_t a = 0; a < rank; ++a) phase += mode.k[a] * x[a];
      g += mode.cos_coef * std::cos(phase) + mode.sin_coef * std::sin(phase);
    }
    rho[p] = std::exp(g);
  }
  const double total = integrate(grid, rho);
  for (auto& r : rho) r /= total;
  return rho;
}

}  // namespace qhd
