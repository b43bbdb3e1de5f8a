#include "qhd/snapshot.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "qhd/binary_io.hpp"
#include "qhd/error.hpp"

namespace qhd {

namespace {

std::string kind_name(SnapshotKind k) {
  switch (k) {
    case SnapshotKind::complex: return "complex";
    case SnapshotKind::real: return "real";
    case SnapshotKind::pair: return "pair";
  }
  return "real";
}

std::size_t values_per_point(SnapshotKind k) { return k == SnapshotKind::real ? 1 : 2; }

std::istringstream header_line(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("QHD1: missing '" + key + "' line");
  std::istringstream ls(line);
  std::string word;
  ls >> word;
  if (word != key) throw FormatError("QHD1: expected '" + key + "', found '" + word + "'");
  return ls;
}

}  // namespace

std::size_t Snapshot::points() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void write_snapshot(std::ostream& out, const Snapshot& snap) {
  if (snap.dims.size() != snap.lengths.size() || snap.dims.empty())
    throw FormatError("QHD1: dims/lengths mismatch");
  if (snap.data.size() != snap.points() * values_per_point(snap.kind))
    throw FormatError("QHD1: payload size does not match dims and kind");
  out << "magic QHD1\n";
  out << "rank " << snap.dims.size() << '\n';
  out << "dims";
  for (auto d : snap.dims) out << ' ' << d;
  out << "\nlengths";
  for (double l : snap.lengths) out << ' ' << io::format_double(l);
  out << "\nkind " << kind_name(snap.kind) << '\n';
  io::write_f64_le(out, snap.data);
}

Snapshot read_snapshot(std::istream& in) {
  Snapshot snap;
  std::string magic;
  header_line(in, "magic") >> magic;
  if (magic != "QHD1") throw FormatError("QHD1: bad magic '" + magic + "'");
  std::size_t rank = 0;
  header_line(in, "rank") >> rank;
  if (rank == 0) throw FormatError("QHD1: rank must be >= 1");
  auto dims = header_line(in, "dims");
  snap.dims.resize(rank);
  for (auto& d : snap.dims)
    if (!(dims >> d)) throw FormatError("QHD1: short dims line");
  auto lengths = header_line(in, "lengths");
  snap.lengths.resize(rank);
  for (auto& l : snap.lengths)
    if (!(lengths >> l)) throw FormatError("QHD1: short lengths line");
  std::string kind;
  header_line(in, "kind") >> kind;
  if (kind == "complex") snap.kind = SnapshotKind::complex;
  else if (kind == "real") snap.kind = SnapshotKind::real;
  else if (kind == "pair") snap.kind = SnapshotKind::pair;
  else throw FormatError("QHD1: unknown kind '" + kind + "'");
  snap.data.resize(snap.points() * values_per_point(snap.kind));
  io::read_f64_le(in, snap.data);
  return snap;
}

void save_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_snapshot(out, snap);
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_snapshot(in);
}

Snapshot make_snapshot(const WaveField& psi) {
  Snapshot s{psi.grid().shape(), psi.grid().lengths(), SnapshotKind::complex, {}};
  s.data.reserve(2 * psi.values().size());
  for (const auto& z : psi.values()) {
    s.data.push_back(z.real());
    s.data.push_back(z.imag());
  }
  return s;
}

Snapshot make_snapshot(const MadelungPair& pair) {
  Snapshot s{pair.grid().shape(), pair.grid().lengths(), SnapshotKind::pair, {}};
  s.data.assign(pair.rho().begin(), pair.rho().end());
  s.data.insert(s.data.end(), pair.phase().begin(), pair.phase().end());
  return s;
}

Snapshot make_snapshot(const LatticeGrid& grid, std::span<const double> field) {
  return Snapshot{grid.shape(), grid.lengths(), SnapshotKind::real, {field.begin(), field.end()}};
}

LatticeGrid grid_from_snapshot(const Snapshot& snap, std::size_t n_particles) {
  const std::size_t rank = snap.dims.size();
  if (n_particles == 0 || rank % n_particles != 0)
    throw ValidationError("snapshot rank is not divisible by the particle count");
  return LatticeGrid(n_particles, rank / n_particles, snap.dims, snap.lengths,
                     RankPolicy::allow_high_rank);
}

WaveField wavefield_from_snapshot(const Snapshot& snap, std::size_t n_particles, double hbar,
                                  double mass) {
  if (snap.kind != SnapshotKind::complex) throw FormatError("snapshot is not a complex field");
  auto grid = grid_from_snapshot(snap, n_particles);
  std::vector<Complex> values(grid.size());
  for (std::size_t p = 0; p < values.size(); ++p)
    values[p] = Complex(snap.data[2 * p], snap.data[2 * p + 1]);
  return WaveField(std::move(grid), std::move(values), hbar, mass);
}

MadelungPair pair_from_snapshot(const Snapshot& snap, std::size_t n_particles, double hbar) {
  if (snap.kind != SnapshotKind::pair) throw FormatError("snapshot is not a density/phase pair");
  auto grid = grid_from_snapshot(snap, n_particles);
  const std::size_t n = grid.size();
  std::vector<double> rho(snap.data.begin(), snap.data.begin() + long(n));
  std::vector<double> phase(snap.data.begin() + long(n), snap.data.end());
  return MadelungPair(std::move(grid), std::move(rho), std::move(phase), hbar);
}

}  // namespace qhd
