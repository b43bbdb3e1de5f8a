#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "qhd/grid.hpp"
#include "qhd/madelung.hpp"

namespace qhd {

enum class SnapshotKind { complex, real, pair };

/// In-memory form of a "QHD1" field snapshot.
///
/// On disk: five text lines
///   magic QHD1 / rank D / dims n_0 .. n_{D-1} / lengths L_0 .. / kind {complex|real|pair}
/// followed by little-endian float64 values in row-major order (complex as
/// interleaved re,im; pair as the rho block then the S block).
struct Snapshot {
  std::vector<std::size_t> dims;
  std::vector<double> lengths;
  SnapshotKind kind = SnapshotKind::real;
  std::vector<double> data;

  std::size_t points() const;
};

void write_snapshot(std::ostream& out, const Snapshot& snap);
Snapshot read_snapshot(std::istream& in);
void save_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot load_snapshot(const std::filesystem::path& path);

Snapshot make_snapshot(const WaveField& psi);
Snapshot make_snapshot(const MadelungPair& pair);
Snapshot make_snapshot(const LatticeGrid& grid, std::span<const double> field);

/// The file does not record how the rank splits into particles; the caller
/// supplies n_particles (rank must be divisible by it).
LatticeGrid grid_from_snapshot(const Snapshot& snap, std::size_t n_particles);
WaveField wavefield_from_snapshot(const Snapshot& snap, std::size_t n_particles, double hbar,
                                  double mass);
MadelungPair pair_from_snapshot(const Snapshot& snap, std::size_t n_particles, double hbar);

}  // namespace qhd
