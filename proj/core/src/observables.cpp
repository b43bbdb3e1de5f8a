#include "qhd/observables.hpp"

#include <algorithm>
#include <cmath>

#include "qhd/error.hpp"
#include "qhd/spectral.hpp"

namespace qhd {

namespace {

struct DensityView {
  std::vector<double> amplitude;  // sqrt(rho)
  std::vector<std::uint8_t> masked;
  double floor = 0.0;
  double max = 0.0;
};

DensityView inspect_density(const LatticeGrid& grid, std::span<const double> rho) {
  if (rho.size() != grid.size()) throw ValidationError("density size does not match grid");
  DensityView view;
  for (double r : rho) {
    if (!std::isfinite(r)) throw FloorViolation("density is not finite");
    view.max = std::max(view.max, r);
  }
  if (!(view.max > 0.0)) throw AllMasked("density has no point above the floor");
  view.floor = kRhoFloorFraction * view.max;
  view.amplitude.resize(rho.size());
  view.masked.resize(rho.size());
  for (std::size_t p = 0; p < rho.size(); ++p) {
    if (rho[p] < -view.floor) throw FloorViolation("density is negative beyond the floor");
    view.masked[p] = rho[p] < view.floor ? 1 : 0;
    view.amplitude[p] = std::sqrt(std::max(rho[p], 0.0));
  }
  return view;
}

MaskedField quantum_potential_axes(const LatticeGrid& grid, std::span<const double> rho,
                                   double hbar, double mass, std::size_t first_axis,
                                   std::size_t n_axes) {
  if (!(hbar > 0.0) || !(mass > 0.0)) throw ValidationError("hbar and mass must be > 0");
  const auto view = inspect_density(grid, rho);
  const SpectralOps ops(grid);
  const auto lap = ops.laplacian(view.amplitude, first_axis, n_axes);
  const double kappa = hbar * hbar / (2.0 * mass);
  MaskedField w{std::vector<double>(rho.size(), 0.0), view.masked};
  for (std::size_t p = 0; p < rho.size(); ++p)
    if (!view.masked[p]) w.values[p] = -kappa * lap[p] / view.amplitude[p];
  return w;
}

}  // namespace

std::size_t MaskedField::masked_count() const {
  return std::size_t(std::count(masked.begin(), masked.end(), std::uint8_t{1}));
}

MaskedField quantum_potential(const LatticeGrid& grid, std::span<const double> rho, double hbar,
                              double mass) {
  return quantum_potential_axes(grid, rho, hbar, mass, 0, grid.rank());
}

MaskedField quantum_potential_block(const LatticeGrid& grid, std::span<const double> rho,
                                    double hbar, double mass, std::size_t particle) {
  if (particle >= grid.n_particles()) throw ValidationError("particle index out of range");
  return quantum_potential_axes(grid, rho, hbar, mass, grid.block_begin(particle),
                                grid.dims_per_particle());
}

StressTensor::StressTensor(std::size_t rank, std::size_t points)
    : masked(points, 0), rank_(rank), packed_(rank * (rank + 1) / 2, std::vector<double>(points)) {}

std::size_t StressTensor::slot(std::size_t j, std::size_t k) const {
  if (j > k) std::swap(j, k);
  // Row-major upper triangle.
  return j * rank_ - j * (j - 1) / 2 + (k - j);
}

std::span<const double> StressTensor::component(std::size_t j, std::size_t k) const {
  return packed_.at(slot(j, k));
}

std::span<double> StressTensor::component(std::size_t j, std::size_t k) {
  return packed_.at(slot(j, k));
}

namespace {

// Pieces shared by the stress tensor and the constitutive residual, built from
// derivatives of sqrt(rho) so that no quantity needs ln(rho) to be periodic.
struct AmplitudeDerivatives {
  std::vector<std::vector<double>> grad;     // d_j phi
  std::vector<std::vector<double>> hessian;  // packed upper triangle d_j d_k phi
  std::vector<double> laplacian;

  const std::vector<double>& second(std::size_t j, std::size_t k, std::size_t rank) const {
    if (j > k) std::swap(j, k);
    return hessian[j * rank - j * (j - 1) / 2 + (k - j)];
  }
};

AmplitudeDerivatives amplitude_derivatives(const SpectralOps& ops, std::span<const double> phi) {
  const std::size_t rank = ops.grid().rank();
  AmplitudeDerivatives d;
  d.grad = ops.gradient(phi);
  for (std::size_t j = 0; j < rank; ++j)
    for (std::size_t k = j; k < rank; ++k) d.hessian.push_back(ops.second_derivative(phi, j, k));
  d.laplacian.assign(phi.size(), 0.0);
  for (std::size_t j = 0; j < rank; ++j) {
    const auto& djj = d.second(j, j, rank);
    for (std::size_t p = 0; p < phi.size(); ++p) d.laplacian[p] += djj[p];
  }
  return d;
}

}  // namespace

StressTensor stress_tensor(const LatticeGrid& grid, std::span<const double> rho,
                           const ConstitutiveParams& params) {
  const auto view = inspect_density(grid, rho);
  const std::size_t rank = grid.rank();
  StressTensor sigma(rank, rho.size());
  sigma.masked = view.masked;
  AmplitudeDerivatives d;
  if (params.c != 0.0) d = amplitude_derivatives(SpectralOps(grid), view.amplitude);
  for (std::size_t j = 0; j < rank; ++j) {
    for (std::size_t k = j; k < rank; ++k) {
      auto out = sigma.component(j, k);
      for (std::size_t p = 0; p < rho.size(); ++p) {
        if (view.masked[p]) {
          out[p] = 0.0;
          continue;
        }
        double s = 0.0;
        if (params.c != 0.0) {
          // d_j d_k ln rho = 2 (phi phi_jk - phi_j phi_k) / phi^2
          const double phi = view.amplitude[p];
          s = 2.0 * params.c *
              (phi * d.second(j, k, rank)[p] - d.grad[j][p] * d.grad[k][p]) / (phi * phi);
        }
        if (j == k) s += params.nonlinear.stress(rho[p]);
        out[p] = s;
      }
    }
  }
  return sigma;
}

double ConstitutiveResidual::worst_l2() const {
  return l2.empty() ? 0.0 : *std::max_element(l2.begin(), l2.end());
}

double ConstitutiveResidual::worst_max() const {
  return max.empty() ? 0.0 : *std::max_element(max.begin(), max.end());
}

ConstitutiveResidual constitutive_residual(const LatticeGrid& grid, std::span<const double> rho,
                                           const ConstitutiveParams& params) {
  const auto view = inspect_density(grid, rho);
  const SpectralOps ops(grid);
  const std::size_t rank = grid.rank();
  const std::size_t n = rho.size();
  const auto d = amplitude_derivatives(ops, view.amplitude);
  const double c = params.c;
  const auto& nl = params.nonlinear;

  // rho W, and rho sigma_jk.
  std::vector<double> rho_w(n);
  for (std::size_t p = 0; p < n; ++p)
    rho_w[p] = 2.0 * c * view.amplitude[p] * d.laplacian[p] + rho[p] * nl.potential(rho[p], view.floor);

  ConstitutiveResidual out;
  out.l2.assign(rank, 0.0);
  out.max.assign(rank, 0.0);
  for (std::size_t j = 0; j < rank; ++j) {
    auto g = ops.derivative(rho_w, j);
    for (std::size_t p = 0; p < n; ++p) {
      // W d_j rho with d_j rho = 2 phi phi_j
      const double w_drho = 4.0 * c * d.laplacian[p] * d.grad[j][p] +
                            2.0 * view.amplitude[p] * d.grad[j][p] * nl.potential(rho[p], view.floor);
      g[p] -= w_drho;
    }
    for (std::size_t k = 0; k < rank; ++k) {
      std::vector<double> t(n);
      const auto& hjk = d.second(j, k, rank);
      for (std::size_t p = 0; p < n; ++p) {
        t[p] = 2.0 * c * (view.amplitude[p] * hjk[p] - d.grad[j][p] * d.grad[k][p]);
        if (j == k) t[p] += rho[p] * nl.stress(rho[p]);
      }
      const auto dt = ops.derivative(t, k);
      for (std::size_t p = 0; p < n; ++p) g[p] -= dt[p];
    }
    double sum = 0.0;
    double mx = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (view.masked[p]) continue;
      sum += g[p] * g[p] / rho[p];
      mx = std::max(mx, std::abs(g[p]));
    }
    out.l2[j] = std::sqrt(sum * grid.cell_volume());
    out.max[j] = mx / view.max;
  }
  return out;
}

std::vector<std::vector<double>> velocity_field(const MadelungPair& pair, double mass) {
  if (!(mass > 0.0)) throw ValidationError("mass must be > 0");
  const SpectralOps ops(pair.grid());
  std::vector<std::vector<double>> u(pair.grid().rank());
  for (std::size_t a = 0; a < u.size(); ++a) {
    u[a] = phase_gradient(ops, pair.phase(), a, pair.hbar());
    for (auto& v : u[a]) v /= mass;
  }
  return u;
}

FisherInformation fisher_information(const LatticeGrid& grid, std::span<const double> rho) {
  const auto view = inspect_density(grid, rho);
  const SpectralOps ops(grid);
  const auto grad = ops.gradient(rho);
  FisherInformation info;
  info.blocks.assign(grid.n_particles(), 0.0);
  double total = 0.0;
  for (std::size_t p = 0; p < rho.size(); ++p) {
    if (view.masked[p]) continue;
    double full = 0.0;
    for (std::size_t a = 0; a < grid.rank(); ++a) full += grad[a][p] * grad[a][p];
    total += full / rho[p];
  }
  for (std::size_t i = 0; i < grid.n_particles(); ++i) {
    double s = 0.0;
    for (std::size_t p = 0; p < rho.size(); ++p) {
      if (view.masked[p]) continue;
      double block = 0.0;
      for (std::size_t a = grid.block_begin(i); a < grid.block_begin(i) + grid.dims_per_particle(); ++a)
        block += grad[a][p] * grad[a][p];
      s += block / rho[p];
    }
    info.blocks[i] = s * grid.cell_volume();
  }
  info.total = total * grid.cell_volume();
  return info;
}

double wave_energy(const WaveField& psi, std::span<const double> potential,
                   const NonlinearTerm& nonlinear) {
  const auto& grid = psi.grid();
  if (potential.size() != grid.size()) throw ValidationError("potential size does not match grid");
  const SpectralOps ops(grid);
  const auto grad = ops.gradient(psi.values());
  const auto rho = psi.density();
  const double floor = rho_floor(rho);
  const double kappa = psi.hbar() * psi.hbar() / (2.0 * psi.mass());
  double e = 0.0;
  for (std::size_t p = 0; p < rho.size(); ++p) {
    double g2 = 0.0;
    for (const auto& g : grad) g2 += std::norm(g[p]);
    e += kappa * g2 + potential[p] * rho[p] + nonlinear.energy_density(rho[p], floor);
  }
  return e * grid.cell_volume();
}

double continuity_residual(const WaveField& psi, const MadelungPair& pair) {
  const auto& grid = psi.grid();
  const SpectralOps ops(grid);
  const auto lap = ops.laplacian(psi.values());
  const auto values = psi.values();
  const auto rho = pair.rho();
  // d rho/dt = 2 Re(conj(psi) dpsi/dt); the potential term is real and drops out.
  const double coef = psi.hbar() / (2.0 * psi.mass());
  std::vector<double> residual(grid.size());
  for (std::size_t p = 0; p < residual.size(); ++p) {
    const Complex dpsi = Complex(0.0, coef) * lap[p];
    residual[p] = 2.0 * (std::conj(values[p]) * dpsi).real();
  }
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    auto flux = phase_gradient(ops, pair.phase(), a, pair.hbar());
    for (std::size_t p = 0; p < flux.size(); ++p) flux[p] *= rho[p] / psi.mass();
    const auto div = ops.derivative(flux, a);
    for (std::size_t p = 0; p < residual.size(); ++p) residual[p] += div[p];
  }
  double s = 0.0;
  for (double r : residual) s += r * r;
  return std::sqrt(s * grid.cell_volume());
}

DiagnosticsRecord energy_report(const MadelungPair& pair, double mass,
                                std::span<const double> potential,
                                const ConstitutiveParams& params) {
  const auto& grid = pair.grid();
  if (potential.size() != grid.size()) throw ValidationError("potential size does not match grid");
  const auto rho = pair.rho();
  const auto view = inspect_density(grid, rho);
  const auto u = velocity_field(pair, mass);

  DiagnosticsRecord r;
  r.norm = integrate(grid, rho);
  double h_cl = 0.0;
  for (std::size_t p = 0; p < rho.size(); ++p) {
    h_cl += params.nonlinear.energy_density(rho[p], view.floor);
    if (view.masked[p]) continue;
    double u2 = 0.0;
    for (const auto& ua : u) u2 += ua[p] * ua[p];
    h_cl += rho[p] * (0.5 * mass * u2 + potential[p]);
  }
  r.h_cl = h_cl * grid.cell_volume();
  const auto info = fisher_information(grid, rho);
  r.fisher = info.total;
  r.fisher_blocks = info.blocks;
  // H_int = -c I / 2, i.e. hbar^2 I / 8m for c = -hbar^2/4m.
  r.h_int = -0.5 * params.c * info.total;
  r.h_total = r.h_cl + r.h_int;

  const auto psi = to_wavefield(pair, mass);
  r.h_eq40 = wave_energy(psi, potential, params.nonlinear);
  r.res_constitutive = constitutive_residual(grid, rho, params).worst_l2();
  r.res_continuity = continuity_residual(psi, pair);
  return r;
}

DiagnosticsRecord energy_report(const MadelungPair& pair, double mass,
                                const PotentialSpec& potential, const ConstitutiveParams& params) {
  return energy_report(pair, mass, potential.sample(pair.grid()), params);
}

DiagnosticsRecord energy_report(const WaveField& psi, std::span<const double> potential,
                                const ConstitutiveParams& params) {
  const auto pair = to_madelung(psi);
  auto r = energy_report(pair, psi.mass(), potential, params);
  r.h_eq40 = wave_energy(psi, potential, params.nonlinear);
  r.res_continuity = continuity_residual(psi, pair);
  return r;
}

DiagnosticsRecord energy_report(const WaveField& psi, const PotentialSpec& potential,
                                const ConstitutiveParams& params) {
  return energy_report(psi, potential.sample(psi.grid()), params);
}

}  // namespace qhd
