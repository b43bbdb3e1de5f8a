#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace qhd {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Per-step diagnostics of a field state. Quantities that need the Madelung
/// representation are NaN when it is unavailable (e.g. across a node).
struct DiagnosticsRecord {
  std::size_t step = 0;
  double time = 0.0;
  double norm = kNaN;
  double h_cl = kNaN;     ///< classical part: kinetic flow + potential + U(rho) energy
  double h_int = kNaN;    ///< internal energy hbar^2 I / 8m
  double h_total = kNaN;  ///< h_cl + h_int
  double h_eq40 = kNaN;   ///< same energy from the wave-function functional
  double fisher = kNaN;
  std::vector<double> fisher_blocks;
  double res_constitutive = kNaN;
  double res_continuity = kNaN;

  /// |h_total - h_eq40| / |h_eq40|.
  double route_gap() const {
    return std::abs(h_total - h_eq40) / std::max(std::abs(h_eq40), 1e-300);
  }
};

/// `step,time,norm,H_cl,H_int,H_total,H_eq40,I,I_1..I_n,res_constitutive,res_continuity`
std::string diagnostics_csv_header(std::size_t n_particles);
std::string diagnostics_csv_row(const DiagnosticsRecord& record, std::size_t n_particles);
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records,
                           std::size_t n_particles, const std::vector<std::string>& comments = {});

}  // namespace qhd
