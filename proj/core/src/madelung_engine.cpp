#include "qhd/madelung_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qhd/error.hpp"
#include "qhd/observables.hpp"

namespace qhd {

namespace {

std::vector<double> mode_filter(const SpectralOps& ops, bool dealias, bool exponential) {
  const auto& grid = ops.grid();
  std::vector<double> f(grid.size(), 1.0);
  for (std::size_t p = 0; p < f.size(); ++p) {
    for (std::size_t a = 0; a < grid.rank(); ++a) {
      const double k_nyq = std::numbers::pi / grid.spacing(a);
      const double eta = std::abs(ops.wavenumbers(a)[grid.index_along(p, a)]) / k_nyq;
      if (dealias && eta > 2.0 / 3.0) f[p] = 0.0;
      if (exponential && eta > 0.9) f[p] *= std::exp(-36.0 * std::pow((eta - 0.9) / 0.1, 8));
    }
  }
  return f;
}

double min_density(std::span<const double> rho, double& max_out) {
  double mn = rho[0];
  double mx = rho[0];
  for (double r : rho) {
    if (!std::isfinite(r)) throw NonFinite("density left the finite range");
    mn = std::min(mn, r);
    mx = std::max(mx, r);
  }
  max_out = mx;
  return mn;
}

void check_nodes(std::span<const double> rho, const char* where) {
  double mx = 0.0;
  const double mn = min_density(rho, mx);
  if (mn < kRhoFloorFraction * mx)
    throw NodeFormation(std::string("density fell below the floor ") + where + " (min " +
                        std::to_string(mn) + ")");
}

double l2_norm(const LatticeGrid& grid, std::span<const double> r,
               std::span<const std::uint8_t> skip) {
  double s = 0.0;
  for (std::size_t p = 0; p < r.size(); ++p)
    if (!skip[p]) s += r[p] * r[p];
  return std::sqrt(s * grid.cell_volume());
}

}  // namespace

MadelungEngine::MadelungEngine(const MadelungPair& init, double mass,
                               std::vector<double> potential, ConstitutiveParams params,
                               EvolveConfig cfg)
    : grid_(init.grid()),
      ops_(grid_),
      hbar_(init.hbar()),
      mass_(mass),
      params_(std::move(params)),
      cfg_(std::move(cfg)),
      potential_(std::move(potential)),
      rho_(init.rho().begin(), init.rho().end()),
      phase_(init.phase().begin(), init.phase().end()) {
  cfg_.validate();
  if (cfg_.imaginary_time) throw ValidationError("the Madelung engine has no imaginary-time mode");
  if (!(mass_ > 0.0)) throw ValidationError("mass must be > 0");
  if (potential_.size() != grid_.size()) throw ValidationError("potential size does not match grid");
  check_nodes(rho_, "in the initial state");
  if (cfg_.dealias || cfg_.spectral_filter)
    filter_ = mode_filter(ops_, cfg_.dealias, cfg_.spectral_filter);
}

MadelungEngine::MadelungEngine(const MadelungPair& init, double mass,
                               const PotentialSpec& potential, ConstitutiveParams params,
                               EvolveConfig cfg)
    : MadelungEngine(init, mass, potential.sample(init.grid()), std::move(params), std::move(cfg)) {}

void MadelungEngine::smooth(std::vector<double>& f) const {
  if (filter_.empty()) return;
  std::vector<Complex> z(f.begin(), f.end());
  ops_.forward(z);
  for (std::size_t p = 0; p < z.size(); ++p) z[p] *= filter_[p];
  ops_.backward(z);
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = z[p].real();
}

MadelungEngine::Rates MadelungEngine::rates(std::span<const double> rho,
                                            std::span<const double> phase) const {
  check_nodes(rho, "during a stage");
  const std::size_t n = rho.size();
  const std::size_t rank = grid_.rank();
  double mx = 0.0;
  for (double r : rho) mx = std::max(mx, r);
  const double floor = kRhoFloorFraction * mx;

  std::vector<double> amp(n);
  for (std::size_t p = 0; p < n; ++p) amp[p] = std::sqrt(rho[p]);
  const auto lap = ops_.laplacian(amp);

  Rates out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<double> speed2(n, 0.0);
  for (std::size_t a = 0; a < rank; ++a) {
    auto u = phase_gradient(ops_, phase, a, hbar_);
    for (auto& v : u) v /= mass_;
    std::vector<double> flux(n);
    for (std::size_t p = 0; p < n; ++p) {
      flux[p] = rho[p] * u[p];
      speed2[p] += u[p] * u[p];
    }
    smooth(flux);
    const auto div = ops_.derivative(flux, a);
    for (std::size_t p = 0; p < n; ++p) out.rho[p] -= div[p];
  }
  if (!filter_.empty()) smooth(speed2);
  for (std::size_t p = 0; p < n; ++p) {
    const double w = 2.0 * params_.c * lap[p] / amp[p];
    out.phase[p] = -0.5 * mass_ * speed2[p] - w - params_.nonlinear.potential(rho[p], floor) -
                   potential_[p];
  }
  if (cfg_.spectral_filter) {
    smooth(out.rho);
    smooth(out.phase);
  }
  return out;
}

void MadelungEngine::step() {
  const double dt = cfg_.dt;
  const std::size_t n = rho_.size();
  auto stage = [&](const Rates& k, double h, std::vector<double>& r, std::vector<double>& s) {
    for (std::size_t p = 0; p < n; ++p) {
      r[p] = rho_[p] + h * k.rho[p];
      s[p] = phase_[p] + h * k.phase[p];
    }
  };
  std::vector<double> r(n), s(n);
  const Rates k1 = rates(rho_, phase_);
  stage(k1, 0.5 * dt, r, s);
  const Rates k2 = rates(r, s);
  stage(k2, 0.5 * dt, r, s);
  const Rates k3 = rates(r, s);
  stage(k3, dt, r, s);
  const Rates k4 = rates(r, s);
  for (std::size_t p = 0; p < n; ++p) {
    r[p] = rho_[p] + dt / 6.0 * (k1.rho[p] + 2.0 * k2.rho[p] + 2.0 * k3.rho[p] + k4.rho[p]);
    s[p] = phase_[p] + dt / 6.0 * (k1.phase[p] + 2.0 * k2.phase[p] + 2.0 * k3.phase[p] + k4.phase[p]);
    if (!std::isfinite(s[p])) throw NonFinite("phase left the finite range");
  }
  check_nodes(r, "after a step");
  rho_ = std::move(r);
  phase_ = std::move(s);
  time_ += dt;
  ++step_;
}

double MadelungEngine::mass_integral() const { return integrate(grid_, rho_); }

MadelungPair MadelungEngine::state() const {
  const double m = mass_integral();
  std::vector<double> rho(rho_);
  for (auto& r : rho) r /= m;
  return MadelungPair(grid_, std::move(rho), phase_, hbar_);
}

DiagnosticsRecord MadelungEngine::diagnostics() const {
  DiagnosticsRecord r;
  const auto pair = state();
  if (cfg_.diagnostics) {
    try {
      r = energy_report(pair, mass_, potential_, params_);
    } catch (const Error& e) {
      if (!is_numerical(e.kind())) throw;
      r = DiagnosticsRecord{};
    }
  }
  r.step = step_;
  r.time = time_;
  r.norm = mass_integral();
  return r;
}

PairEvolution MadelungEngine::run() {
  PairEvolution out{state(), {}, {}, RunStatus::completed, {}};
  const std::size_t last = step_ + cfg_.steps;
  auto record = [&] {
    out.records.push_back(diagnostics());
    out.state = state();
    if (cfg_.keep_snapshots) out.snapshots.push_back(out.state);
  };
  record();
  while (step_ < last) {
    try {
      step();
    } catch (const NodeFormation& e) {
      out.status = RunStatus::node_formation;
      out.detail = e.what();
      out.state = state();
      return out;
    } catch (const NonFinite& e) {
      out.status = RunStatus::non_finite;
      out.detail = e.what();
      out.state = state();
      return out;
    }
    if (step_ % cfg_.record_every == 0 || step_ == last) record();
  }
  return out;
}

PairEvolution evolve_madelung(const MadelungPair& pair, double mass,
                              std::span<const double> potential, const ConstitutiveParams& params,
                              const EvolveConfig& cfg) {
  MadelungEngine engine(pair, mass, std::vector<double>(potential.begin(), potential.end()), params,
                        cfg);
  return engine.run();
}

PairEvolution evolve_madelung(const MadelungPair& pair, double mass, const PotentialSpec& potential,
                              const ConstitutiveParams& params, const EvolveConfig& cfg) {
  return evolve_madelung(pair, mass, potential.sample(pair.grid()), params, cfg);
}

double HydroResiduals::max_continuity() const {
  return continuity.empty() ? 0.0 : *std::max_element(continuity.begin(), continuity.end());
}

double HydroResiduals::max_hamilton_jacobi() const {
  return hamilton_jacobi.empty() ? 0.0
                                 : *std::max_element(hamilton_jacobi.begin(), hamilton_jacobi.end());
}

HydroResiduals hydrodynamic_residuals(const std::vector<MadelungPair>& series, double dt,
                                      double mass, std::span<const double> potential,
                                      const ConstitutiveParams& params) {
  if (series.size() < 3) throw SeriesTooShort("need at least 3 snapshots");
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (!(mass > 0.0)) throw ValidationError("mass must be > 0");
  const auto& grid = series.front().grid();
  for (const auto& s : series)
    if (!(s.grid() == grid)) throw ValidationError("series snapshots must share one grid");
  if (potential.size() != grid.size()) throw ValidationError("potential size does not match grid");
  const SpectralOps ops(grid);
  const double hbar = series.front().hbar();
  const double period = 2.0 * std::numbers::pi * hbar;
  const std::size_t n = grid.size();

  HydroResiduals out;
  for (std::size_t k = 1; k + 1 < series.size(); ++k) {
    const auto& prev = series[k - 1];
    const auto& cur = series[k];
    const auto& next = series[k + 1];
    const auto rho = cur.rho();
    double mx = 0.0;
    for (double r : rho) mx = std::max(mx, r);
    const double floor = kRhoFloorFraction * mx;
    std::vector<std::uint8_t> skip(n);
    for (std::size_t p = 0; p < n; ++p) skip[p] = rho[p] < floor ? 1 : 0;

    std::vector<double> cont(n), hj(n);
    for (std::size_t p = 0; p < n; ++p) {
      cont[p] = (next.rho()[p] - prev.rho()[p]) / (2.0 * dt);
      hj[p] = wrap_symmetric(next.phase()[p] - prev.phase()[p], period) / (2.0 * dt);
    }
    for (std::size_t a = 0; a < grid.rank(); ++a) {
      auto grad = phase_gradient(ops, cur.phase(), a, hbar);
      std::vector<double> flux(n);
      for (std::size_t p = 0; p < n; ++p) {
        flux[p] = rho[p] * grad[p] / mass;
        hj[p] += 0.5 * grad[p] * grad[p] / mass;
      }
      const auto div = ops.derivative(flux, a);
      for (std::size_t p = 0; p < n; ++p) cont[p] += div[p];
    }
    const auto w = quantum_potential(grid, rho, hbar, mass);
    const double quantum_scale = params.c / (-hbar * hbar / (4.0 * mass));
    for (std::size_t p = 0; p < n; ++p)
      hj[p] += quantum_scale * w.values[p] + params.nonlinear.potential(rho[p], floor) + potential[p];
    out.continuity.push_back(l2_norm(grid, cont, skip));
    out.hamilton_jacobi.push_back(l2_norm(grid, hj, skip));
  }
  return out;
}

}  // namespace qhd
