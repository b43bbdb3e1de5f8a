#include "qhd/schrodinger.hpp"

#include <cmath>
#include <numbers>

#include "qhd/error.hpp"
#include "qhd/observables.hpp"
#include "qhd/parallel.hpp"

namespace qhd {

void EvolveConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
  if (steps < 1) throw ValidationError("steps must be >= 1");
  if (record_every < 1) throw ValidationError("record_every must be >= 1");
}

double default_time_step(const LatticeGrid& grid, double hbar, double mass) {
  const double h = grid.min_spacing();
  return 0.1 * mass * h * h / (std::numbers::pi * hbar);
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::non_finite: return "non_finite";
    case RunStatus::node_formation: return "node_formation";
  }
  return "unknown";
}

SchrodingerEngine::SchrodingerEngine(const WaveField& init, std::vector<double> potential,
                                     EvolveConfig cfg)
    : grid_(init.grid()),
      ops_(grid_),
      hbar_(init.hbar()),
      mass_(init.mass()),
      cfg_(std::move(cfg)),
      potential_(std::move(potential)),
      psi_(init.values().begin(), init.values().end()) {
  cfg_.validate();
  if (potential_.size() != grid_.size()) throw ValidationError("potential size does not match grid");
  for (double v : potential_)
    if (!std::isfinite(v)) throw ValidationError("potential must be finite");
  const auto k2 = ops_.k_squared();
  const double scale = hbar_ * cfg_.dt / (2.0 * mass_);
  if (cfg_.imaginary_time) {
    kinetic_decay_.resize(k2.size());
    for (std::size_t p = 0; p < k2.size(); ++p) kinetic_decay_[p] = std::exp(-scale * k2[p]);
  } else {
    kinetic_factor_.resize(k2.size());
    for (std::size_t p = 0; p < k2.size(); ++p) kinetic_factor_[p] = std::polar(1.0, -scale * k2[p]);
  }
}

SchrodingerEngine::SchrodingerEngine(const WaveField& init, const PotentialSpec& potential,
                                     EvolveConfig cfg)
    : SchrodingerEngine(init, potential.sample(init.grid()), std::move(cfg)) {}

void SchrodingerEngine::potential_half_step() {
  const double half = 0.5 * cfg_.dt / hbar_;
  const auto& nl = cfg_.nonlinear;
  double floor = 0.0;
  if (!nl.is_none()) {
    double mx = 0.0;
    for (const auto& z : psi_) mx = std::max(mx, std::norm(z));
    floor = kRhoFloorFraction * mx;
  }
  const bool imaginary = cfg_.imaginary_time;
  parallel_for(0, psi_.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      double v = potential_[p];
      if (!nl.is_none()) v += nl.potential(std::norm(psi_[p]), floor);
      if (imaginary) {
        psi_[p] *= std::exp(-v * half);
      } else
        psi_[p] *= std::polar(1.0, -v * half);
    }
  });
}

void SchrodingerEngine::implicit_potential_half_step() {
  // Solves psi' = psi exp(-dt/2hbar (V + U(rho'))) with rho' the normalized
  // density of psi', by fixed-point iteration over the whole field.
  const double half = 0.5 * cfg_.dt / hbar_;
  const auto& nl = cfg_.nonlinear;
  const std::vector<Complex> start = psi_;
  for (int it = 0; it < 100; ++it) {
    double n2 = 0.0;
    double mx = 0.0;
    for (const auto& z : psi_) {
      n2 += std::norm(z);
      mx = std::max(mx, std::norm(z));
    }
    const double inv = 1.0 / (n2 * grid_.cell_volume());
    const double floor = kRhoFloorFraction * mx * inv;
    double change = 0.0;
    for (std::size_t p = 0; p < psi_.size(); ++p) {
      const double v = potential_[p] + nl.potential(std::norm(psi_[p]) * inv, floor);
      const Complex next = start[p] * std::exp(-v * half);
      change = std::max(change, std::abs(next - psi_[p]));
      psi_[p] = next;
    }
    if (change <= 1e-15 * std::sqrt(mx)) return;
  }
}

void SchrodingerEngine::step() {
  potential_half_step();
  ops_.forward(psi_);
  if (cfg_.imaginary_time) {
    for (std::size_t p = 0; p < psi_.size(); ++p) psi_[p] *= kinetic_decay_[p];
  } else {
    for (std::size_t p = 0; p < psi_.size(); ++p) psi_[p] *= kinetic_factor_[p];
  }
  ops_.backward(psi_);
  if (cfg_.imaginary_time && !cfg_.nonlinear.is_none()) {
    normalize();
    implicit_potential_half_step();
  } else {
    potential_half_step();
  }

  if (cfg_.imaginary_time) {
    normalize();
  } else {
    double n2 = 0.0;
    for (const auto& z : psi_) n2 += std::norm(z);
    if (!std::isfinite(n2))
      throw NonFinite("wave field left the finite range at step " + std::to_string(step_ + 1));
  }
  time_ += cfg_.dt;
  ++step_;
}

void SchrodingerEngine::normalize() {
  double n2 = 0.0;
  for (const auto& z : psi_) n2 += std::norm(z);
  if (!std::isfinite(n2) || !(n2 > 0.0))
    throw NonFinite("wave field left the finite range at step " + std::to_string(step_ + 1));
  const double scale = 1.0 / std::sqrt(n2 * grid_.cell_volume());
  for (auto& z : psi_) z *= scale;
}

WaveField SchrodingerEngine::state() const {
  return WaveField::normalized(grid_, psi_, hbar_, mass_);
}

double SchrodingerEngine::energy() const {
  return wave_energy(state(), potential_, cfg_.nonlinear);
}

DiagnosticsRecord wave_diagnostics(const WaveField& psi, std::span<const double> potential,
                                   const NonlinearTerm& nonlinear) {
  DiagnosticsRecord r;
  try {
    r = energy_report(psi, potential,
                      ConstitutiveParams::quantum(psi.hbar(), psi.mass(), nonlinear));
  } catch (const Error& e) {
    if (!is_numerical(e.kind())) throw;
    r = DiagnosticsRecord{};
    r.h_eq40 = wave_energy(psi, potential, nonlinear);
  }
  return r;
}

DiagnosticsRecord SchrodingerEngine::diagnostics() const {
  double n2 = 0.0;
  for (const auto& z : psi_) n2 += std::norm(z);
  n2 *= grid_.cell_volume();
  const auto psi = state();
  DiagnosticsRecord r;
  if (cfg_.diagnostics) {
    r = wave_diagnostics(psi, potential_, cfg_.nonlinear);
  } else {
    r.h_eq40 = wave_energy(psi, potential_, cfg_.nonlinear);
  }
  r.step = step_;
  r.time = time_;
  r.norm = n2;
  return r;
}

WaveEvolution SchrodingerEngine::run() {
  WaveEvolution out{state(), {}, {}, RunStatus::completed, {}};
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
    } catch (const NonFinite& e) {
      out.status = RunStatus::non_finite;
      out.detail = e.what();
      return out;
    }
    if (step_ % cfg_.record_every == 0 || step_ == last) record();
  }
  return out;
}

WaveEvolution evolve(const WaveField& psi, std::span<const double> potential,
                     const EvolveConfig& cfg) {
  SchrodingerEngine engine(psi, std::vector<double>(potential.begin(), potential.end()), cfg);
  return engine.run();
}

WaveEvolution evolve(const WaveField& psi, const PotentialSpec& potential, const EvolveConfig& cfg) {
  return evolve(psi, potential.sample(psi.grid()), cfg);
}

GroundState ground_state(std::span<const double> potential, const EvolveConfig& cfg,
                         const WaveField& init, double tol, std::size_t max_steps) {
  EvolveConfig relax = cfg;
  relax.imaginary_time = true;
  if (max_steps == 0) max_steps = cfg.steps;
  SchrodingerEngine engine(init, std::vector<double>(potential.begin(), potential.end()), relax);
  std::vector<double> history{engine.energy()};
  for (std::size_t k = 1; k <= max_steps; ++k) {
    engine.step();
    const double e = engine.energy();
    const double change = std::abs(e - history.back());
    history.push_back(e);
    if (change < tol * std::abs(e) || (std::abs(e) < tol && change < tol))
      return {engine.state(), e, k, std::move(history)};
  }
  throw NoConvergence("ground state did not converge in " + std::to_string(max_steps) +
                      " steps (last change " +
                      std::to_string(std::abs(history.back() - history[history.size() - 2])) + ")");
}

GroundState ground_state(const PotentialSpec& potential, const EvolveConfig& cfg,
                         const WaveField& init, double tol, std::size_t max_steps) {
  return ground_state(potential.sample(init.grid()), cfg, init, tol, max_steps);
}

}  // namespace qhd
