#include "qhd/lab/check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qhd/kinetics.hpp"
#include "qhd/states.hpp"

namespace qhd::lab {

namespace {

constexpr double kHbar = 1.0;
constexpr double kMass = 1.0;

CheckResult below(std::string name, double measured, double tolerance, std::string detail = {}) {
  return {std::move(name), std::isfinite(measured) && measured < tolerance, measured, tolerance,
          std::move(detail)};
}

CheckResult potential_identity(const QuantumPotentialFn& qp, const LatticeGrid& grid,
                               const std::string& name) {
  double worst = 0.0;
  double worst_lhs = 0.0;
  bool negative = false;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rho = random_nodeless_density(grid, 2, 0.3, seed);
    const auto w = qp(grid, rho, kHbar, kMass);
    std::vector<double> rho_w(rho.size());
    for (std::size_t p = 0; p < rho.size(); ++p) rho_w[p] = rho[p] * w.values[p];
    const double lhs = integrate(grid, rho_w);
    const double rhs = kHbar * kHbar * fisher_information(grid, rho).total / (8.0 * kMass);
    const double rel = std::abs(lhs - rhs) / std::abs(rhs);
    negative = negative || lhs < 0.0;
    if (rel >= worst) {
      worst = rel;
      worst_lhs = lhs;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "lhs=%.6g%s", worst_lhs, negative ? " (negative)" : "");
  auto r = below(name, worst, 1e-8, buf);
  r.pass = r.pass && !negative;
  return r;
}

}  // namespace

double gaussian_constitutive_residual(std::size_t points, const NonlinearTerm& nonlinear) {
  const LatticeGrid grid(1, 1, {points}, {10.0});
  GaussianPacket packet{{1.0}, {}, {}};
  const auto rho = periodic_gaussian(grid, packet, kHbar, kMass).density();
  return constitutive_residual(grid, rho, ConstitutiveParams::quantum(kHbar, kMass, nonlinear))
      .worst_l2();
}

std::vector<CheckResult> run_checks(const CheckOptions& options) {
  const QuantumPotentialFn qp = options.quantum_potential
                                    ? options.quantum_potential
                                    : QuantumPotentialFn([](const LatticeGrid& g, std::span<const double> r,
                                                            double h, double m) {
                                        return quantum_potential(g, r, h, m);
                                      });
  std::vector<CheckResult> out;
  const double two_pi = 2.0 * std::numbers::pi;
  const LatticeGrid line(1, 1, {64}, {two_pi});
  const LatticeGrid plane(2, 1, {64, 64}, {two_pi, two_pi});

  out.push_back(potential_identity(qp, line, "potential-fisher identity D=1"));
  out.push_back(potential_identity(qp, plane, "potential-fisher identity D=2"));

  {
    double worst = 0.0;
    for (std::uint64_t seed = 11; seed <= 15; ++seed) {
      const auto rho = random_nodeless_density(plane, 2, 0.3, seed);
      const auto info = fisher_information(plane, rho);
      double sum = 0.0;
      for (double b : info.blocks) sum += b;
      worst = std::max(worst, std::abs(info.total - sum) / info.total);
    }
    out.push_back(below("fisher additivity D=2", worst, 1e-10));
  }

  {
    double worst = 0.0;
    for (std::uint64_t seed = 21; seed <= 25; ++seed) {
      const auto rho = random_nodeless_density(plane, 2, 0.3, seed);
      const auto w = qp(plane, rho, kHbar, kMass);
      const auto w1 = quantum_potential_block(plane, rho, kHbar, kMass, 0);
      const auto w2 = quantum_potential_block(plane, rho, kHbar, kMass, 1);
      double scale = 0.0;
      double diff = 0.0;
      for (std::size_t p = 0; p < rho.size(); ++p) {
        scale = std::max(scale, std::abs(w.values[p]));
        diff = std::max(diff, std::abs(w.values[p] - w1.values[p] - w2.values[p]));
      }
      worst = std::max(worst, diff / scale);
    }
    out.push_back(below("quantum potential block sum D=2", worst, 1e-10));
  }

  const std::vector<std::pair<std::string, NonlinearTerm>> variants = {
      {"none", NonlinearTerm::none()},
      {"cubic", NonlinearTerm::cubic(0.7)},
      {"log", NonlinearTerm::logarithmic(0.4)}};
  for (const auto& [label, nl] : variants) {
    const double fine = gaussian_constitutive_residual(256, nl);
    const double coarse = gaussian_constitutive_residual(16, nl);
    out.push_back(below("constitutive residual " + label + " N=256", fine, 1e-6));
    char buf[96];
    std::snprintf(buf, sizeof buf, "N=16: %.3g, N=256: %.3g", coarse, fine);
    const double factor = coarse / std::max(fine, 1e-300);
    out.push_back({"constitutive refinement " + label, factor > 1e3, factor, 1e3, buf});
  }

  {
    const auto rho = random_nodeless_density(plane, 2, 0.3, 31);
    double worst = 0.0;
    const double a = 0.7;
    const auto cubic = stress_tensor(plane, rho, ConstitutiveParams::classical(NonlinearTerm::cubic(a)));
    const auto logs = stress_tensor(plane, rho, ConstitutiveParams::classical(NonlinearTerm::logarithmic(0.4)));
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t p = 0; p < rho.size(); ++p) {
          const double want_cubic = j == k ? 0.5 * a * rho[p] : 0.0;
          const double want_log = j == k ? 0.4 : 0.0;
          worst = std::max(worst, std::abs(cubic(j, k, p) - want_cubic));
          worst = std::max(worst, std::abs(logs(j, k, p) - want_log));
        }
    out.push_back(below("nonlinear stress tensors", worst, 1e-12));
  }

  {
    const LatticeGrid grid(1, 1, {128}, {10.0});
    GaussianPacket packet{{1.0}, {0.5}, {two_pi * 2.0 / 10.0}};
    const auto psi = periodic_gaussian(grid, packet, kHbar, kMass);
    const auto v = PotentialSpec::harmonic(kMass, 0.5).sample(grid);
    const auto r = energy_report(psi, v, ConstitutiveParams::quantum(kHbar, kMass));
    out.push_back(below("energy routes agree", r.route_gap(), 1e-8));
  }

  {
    EnsembleSpec spec;
    spec.count = 4000;
    spec.dims = 3;
    spec.box = {1.0, 1.0, 1.0};
    spec.seed = 7;
    auto ens = sample_ensemble(spec);
    const CollisionSettings settings{{4, 4, 4}, 50.0};
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      auto step = advance(ens, MonadPotential::zero(), settings, 0.01);
      worst = std::max({worst, step.stats.max_event_momentum_error, step.stats.max_event_energy_error});
      ens = std::move(step.ensemble);
    }
    out.push_back(below("collision invariants per event", worst, 1e-12));
  }

  {
    EnsembleSpec spec;
    spec.count = 20000;
    spec.dims = 3;
    spec.box = {1.0, 1.0, 1.0};
    spec.seed = 8;
    auto ens = sample_ensemble(spec);
    const std::vector<std::size_t> cells = {8, 1, 1};
    const CollisionSettings settings{cells, 20.0};
    const double dt = 0.01;
    std::vector<SplitMoments> series{project_split(ens, cells)};
    for (int s = 0; s < 10; ++s) {
      ens = advance(ens, MonadPotential::zero(), settings, dt).ensemble;
      series.push_back(project_split(ens, cells));
    }
    const auto res = moment_residuals(series, dt);
    double worst = std::max(res.continuity.ratio(), res.energy.ratio());
    for (const auto& m : res.momentum) worst = std::max(worst, m.ratio());
    out.push_back(below("moment residuals / noise floor", worst, 2.0));
  }
  return out;
}

int report_checks(const std::vector<CheckResult>& results, std::ostream& out) {
  bool all = true;
  for (const auto& r : results) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e (limit %.1e)", r.measured, r.tolerance);
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << buf;
    if (!r.detail.empty()) out << " " << r.detail;
    out << '\n';
    all = all && r.pass;
  }
  out << (all ? "all checks passed\n" : "some checks failed\n");
  return all ? 0 : 1;
}

}  // namespace qhd::lab
