#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qhd/observables.hpp"

namespace qhd::lab {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

using QuantumPotentialFn =
    std::function<MaskedField(const LatticeGrid&, std::span<const double>, double, double)>;

struct CheckOptions {
  /// Replaces quantum_potential inside the battery (used to test the checks).
  QuantumPotentialFn quantum_potential;
};

/// Built-in verification battery on canned states.
std::vector<CheckResult> run_checks(const CheckOptions& options = {});

/// One line per check; returns 0 when all pass and 1 otherwise.
int report_checks(const std::vector<CheckResult>& results, std::ostream& out);

/// Constitutive residual (worst L2 component) for a periodised Gaussian
/// with the given nonlinearity on an n-point 1D grid.
double gaussian_constitutive_residual(std::size_t points, const NonlinearTerm& nonlinear);

}  // namespace qhd::lab
