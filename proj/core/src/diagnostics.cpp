#include "qhd/diagnostics.hpp"

#include "qhd/binary_io.hpp"

namespace qhd {

std::string diagnostics_csv_header(std::size_t n_particles) {
  std::string h = "step,time,norm,H_cl,H_int,H_total,H_eq40,I";
  for (std::size_t i = 1; i <= n_particles; ++i) h += ",I_" + std::to_string(i);
  h += ",res_constitutive,res_continuity";
  return h;
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r, std::size_t n_particles) {
  using io::format_double;
  std::string row = std::to_string(r.step);
  for (double v : {r.time, r.norm, r.h_cl, r.h_int, r.h_total, r.h_eq40, r.fisher})
    row += "," + format_double(v);
  for (std::size_t i = 0; i < n_particles; ++i)
    row += "," + format_double(i < r.fisher_blocks.size() ? r.fisher_blocks[i] : kNaN);
  row += "," + format_double(r.res_constitutive);
  row += "," + format_double(r.res_continuity);
  return row;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records,
                           std::size_t n_particles, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << diagnostics_csv_header(n_particles) << '\n';
  for (const auto& r : records) out << diagnostics_csv_row(r, n_particles) << '\n';
}

}  // namespace qhd
